//! Worst-case training energy, carbon, and estimate/measurement comparison.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CarbonIntensity, EnergyEstimate, EnergyMethod, HardwareSpec};

/// Energy drawn if every device ran at its spec maximum for `hours`:
/// `watts × count × hours / 1000` kWh.
pub fn worst_case_kwh(hw: &HardwareSpec, hours: f64) -> Result<EnergyEstimate> {
    if !(hours.is_finite() && hours >= 0.0) {
        return Err(Error::Domain(format!("hours must be ≥ 0, got {hours}")));
    }
    let kwh = hw.max_power_watts * f64::from(hw.count) * hours / 1000.0;
    EnergyEstimate::new(kwh, EnergyMethod::WorstCaseSpec)
}

/// Grams of CO2-equivalent for an energy amount.
pub fn carbon_g(e: &EnergyEstimate, ci: &CarbonIntensity) -> f64 {
    e.kwh * ci.g_co2_per_kwh
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub estimate: EnergyEstimate,
    pub measured: EnergyEstimate,
    /// `measured - estimate`, kWh.
    pub delta_kwh: f64,
    /// `delta / estimate`. `None` when the estimate is zero and the
    /// measurement is not.
    pub relative: Option<f64>,
}

pub fn estimate_vs_measured(estimate: &EnergyEstimate, measured: &EnergyEstimate) -> Comparison {
    let delta_kwh = measured.kwh - estimate.kwh;
    let relative = if estimate.kwh > 0.0 {
        Some(delta_kwh / estimate.kwh)
    } else if delta_kwh == 0.0 {
        Some(0.0)
    } else {
        None
    };
    Comparison {
        estimate: *estimate,
        measured: *measured,
        delta_kwh,
        relative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hw(name: &str, watts: f64, count: u32) -> HardwareSpec {
        HardwareSpec::new(name, watts, count).unwrap()
    }

    #[test]
    fn table1_rows_are_exact() {
        let rows = [
            (hw("V100", 300.0, 1), 272.0, 81.6),
            (hw("V100", 300.0, 1), 108.0, 32.4),
            (hw("TITAN X", 250.0, 1), 168.0, 42.0),
            (hw("P100", 250.0, 4), 52.0, 52.0),
            (hw("P100", 250.0, 1), 96.0, 24.0),
        ];
        for (h, hours, expected) in rows {
            let e = worst_case_kwh(&h, hours).unwrap();
            assert_eq!(e.kwh, expected, "{} {hours}", h.name);
            assert_eq!(e.method, EnergyMethod::WorstCaseSpec);
        }
    }

    #[test]
    fn zero_and_negative_hours() {
        assert_eq!(worst_case_kwh(&hw("V100", 300.0, 8), 0.0).unwrap().kwh, 0.0);
        assert!(matches!(
            worst_case_kwh(&hw("V100", 300.0, 1), -1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn carbon() {
        let e = |k| EnergyEstimate::new(k, EnergyMethod::WorstCaseSpec).unwrap();
        let ci = |g| CarbonIntensity::new("fixture", g).unwrap();
        assert_eq!(carbon_g(&e(81.6), &ci(0.0)), 0.0);
        assert_eq!(carbon_g(&e(1.0), &ci(500.0)), 500.0);
        assert_eq!(carbon_g(&e(42.0), &ci(300.0)), 12_600.0);
    }

    #[test]
    fn sing_comparison() {
        let est = EnergyEstimate::new(52.0, EnergyMethod::WorstCaseSpec).unwrap();
        let meas = EnergyEstimate::new(64.8, EnergyMethod::MeasuredExtrapolated).unwrap();
        let c = estimate_vs_measured(&est, &meas);
        assert!((c.delta_kwh - 12.8).abs() < 1e-9);
        assert!((c.relative.unwrap() - 0.2462).abs() < 1e-4);
    }

    #[test]
    fn comparison_edges() {
        let e = |k| EnergyEstimate::new(k, EnergyMethod::MeasuredIntegrated).unwrap();
        let same = estimate_vs_measured(&e(7.5), &e(7.5));
        assert_eq!((same.delta_kwh, same.relative), (0.0, Some(0.0)));
        assert_eq!(estimate_vs_measured(&e(0.0), &e(5.0)).relative, None);
    }

    proptest! {
        #[test]
        fn linear_in_hours(watts in 1.0..1000.0f64, count in 1u32..16, a in 0.0..1e4f64, b in 0.0..1e4f64) {
            let h = hw("gpu", watts, count);
            let whole = worst_case_kwh(&h, a + b).unwrap().kwh;
            let parts = worst_case_kwh(&h, a).unwrap().kwh + worst_case_kwh(&h, b).unwrap().kwh;
            prop_assert!((whole - parts).abs() <= 1e-9 * whole.max(1.0));
        }

        #[test]
        fn doubling_count_doubles_energy(watts in 1.0..1000.0f64, count in 1u32..1024, hours in 0.0..1e4f64) {
            let single = worst_case_kwh(&hw("gpu", watts, count), hours).unwrap().kwh;
            let double = worst_case_kwh(&hw("gpu", watts, count * 2), hours).unwrap().kwh;
            prop_assert_eq!(double, 2.0 * single);
        }
    }
}
