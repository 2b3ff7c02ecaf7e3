//! Quadratic brute-force Pareto front and seeded random instances.

#![allow(dead_code)]

use greeneval::pareto::{dominates, pareto_front};
use greeneval::EvalPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Strict dominance written out directly: no worse everywhere, better
/// somewhere.
pub fn brute_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// `(optimal, dominated-with-dominators)` as index lists in input order.
pub fn brute_front(points: &[Vec<f64>]) -> (Vec<usize>, Vec<(usize, Vec<usize>)>) {
    let mut optimal = Vec::new();
    let mut dominated = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let by: Vec<usize> = (0..points.len())
            .filter(|&j| j != i && brute_dominates(&points[j], p))
            .collect();
        if by.is_empty() {
            optimal.push(i);
        } else {
            dominated.push((i, by));
        }
    }
    (optimal, dominated)
}

pub fn label(i: usize) -> String {
    format!("p{i}")
}

pub fn to_points(raw: &[Vec<f64>]) -> Vec<EvalPoint> {
    raw.iter()
        .enumerate()
        .map(|(i, v)| EvalPoint::new(label(i), v.clone()).unwrap())
        .collect()
}

/// Compares the library front against the brute-force one, labels and
/// dominator lists included.
pub fn check_instance(raw: &[Vec<f64>]) -> Result<(), String> {
    let got = pareto_front(&to_points(raw)).map_err(|e| e.to_string())?;
    let (opt, dom) = brute_front(raw);
    let want_opt: Vec<String> = opt.into_iter().map(label).collect();
    if got.optimal != want_opt {
        return Err(format!("optimal set differs: got {:?}, want {:?}", got.optimal, want_opt));
    }
    if got.dominated.len() != dom.len() {
        return Err(format!("dominated count {} vs {}", got.dominated.len(), dom.len()));
    }
    for (g, (i, by)) in got.dominated.iter().zip(dom) {
        let want: Vec<String> = by.into_iter().map(label).collect();
        if g.label != label(i) || g.dominators != want {
            return Err(format!("{}: dominators {:?}, want {:?}", g.label, g.dominators, want));
        }
    }
    Ok(())
}

/// Instance `idx` of a reproducible family: even indices draw continuous
/// values, odd ones draw from `{0, 1, 2, 3}` (with zeros randomly signed) so
/// ties and duplicate points are common. Every tenth instance has the
/// maximum size.
pub fn random_instance(seed: u64, idx: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let n = if idx.is_multiple_of(10) { 1000 } else { rng.random_range(1..=1000) };
    let k = rng.random_range(1..=5);
    let ties = idx % 2 == 1;
    (0..n)
        .map(|_| {
            (0..k)
                .map(|_| {
                    if ties {
                        let v = rng.random_range(0..4) as f64;
                        if v == 0.0 && rng.random_bool(0.5) {
                            -0.0
                        } else {
                            v
                        }
                    } else {
                        rng.random_range(-1.0e3..1.0e3)
                    }
                })
                .collect()
        })
        .collect()
}

fn small_point(rng: &mut ChaCha8Rng, k: usize) -> EvalPoint {
    let v = (0..k).map(|_| rng.random_range(0..3) as f64).collect();
    EvalPoint::new("x", v).unwrap()
}

/// Adds 0 or 1 to each coordinate.
fn worsen(rng: &mut ChaCha8Rng, p: &EvalPoint) -> EvalPoint {
    let v = p.objectives().iter().map(|x| x + rng.random_range(0..2) as f64).collect();
    EvalPoint::new("x", v).unwrap()
}

/// Checks antisymmetry on `pairs` random pairs and transitivity on
/// `triples` random triples on a small integer grid, half of them built so
/// that chains `a ≺ b ≺ c` are frequent. Returns how many triples had a chained premise.
pub fn check_order_laws(seed: u64, pairs: usize, triples: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pairs {
        let k = rng.random_range(1..=5);
        let a = small_point(&mut rng, k);
        let b = if rng.random_bool(0.5) { worsen(&mut rng, &a) } else { small_point(&mut rng, k) };
        if dominates(&a, &b).unwrap() && dominates(&b, &a).unwrap() {
            return Err(format!("antisymmetry: {:?} and {:?}", a.objectives(), b.objectives()));
        }
        if dominates(&a, &a).unwrap() {
            return Err(format!("irreflexivity: {:?}", a.objectives()));
        }
    }
    let mut chained = 0;
    for i in 0..triples {
        let k = rng.random_range(1..=5);
        let a = small_point(&mut rng, k);
        // Half the triples are built as non-decreasing walks so the premise
        // holds often; the other half are independent draws.
        let (b, c) = if i % 2 == 0 {
            let b = worsen(&mut rng, &a);
            let c = worsen(&mut rng, &b);
            (b, c)
        } else {
            (small_point(&mut rng, k), small_point(&mut rng, k))
        };
        if dominates(&a, &b).unwrap() && dominates(&b, &c).unwrap() {
            chained += 1;
            if !dominates(&a, &c).unwrap() {
                return Err(format!(
                    "transitivity: {:?} {:?} {:?}",
                    a.objectives(),
                    b.objectives(),
                    c.objectives()
                ));
            }
        }
    }
    Ok(chained)
}
