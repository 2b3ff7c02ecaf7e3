//! Pareto dominance and front extraction over minimization objectives.
//!
//! `a` dominates `b` iff `a` is no worse in every objective and strictly
//! better in at least one. Points with identical coordinates therefore never
//! dominate each other and are all kept on the front.
//!
//! The non-dominated set is found by a sort-and-sweep for one or two
//! objectives (`O(n log n)`) and by a pairwise scan otherwise. Dominator
//! lists are exhaustive, which costs a pairwise pass over the dominated
//! points.

use std::cmp::Ordering;
use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::EvalPoint;

/// Point count above which the pairwise passes run in parallel.
const PARALLEL_THRESHOLD: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dominated {
    pub label: String,
    /// Every input point dominating this one, in input order.
    pub dominators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct FrontResult {
    /// Non-dominated labels, in input order.
    pub optimal: Vec<String>,
    /// Dominated labels with their dominators, in input order.
    pub dominated: Vec<Dominated>,
}

impl FrontResult {
    pub fn is_optimal(&self, label: &str) -> bool {
        self.optimal.iter().any(|l| l == label)
    }

    pub fn dominators_of(&self, label: &str) -> Option<&[String]> {
        self.dominated
            .iter()
            .find(|d| d.label == label)
            .map(|d| d.dominators.as_slice())
    }
}

fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

pub fn dominates(a: &EvalPoint, b: &EvalPoint) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(dominates_unchecked(a.objectives(), b.objectives()))
}

/// Shared objective count, after checking labels are unique.
fn check_points(points: &[EvalPoint]) -> Result<usize> {
    let Some(first) = points.first() else {
        return Ok(0);
    };
    let k = first.dim();
    let mut seen = HashSet::with_capacity(points.len());
    for p in points {
        if p.dim() != k {
            return Err(Error::Dimension {
                expected: k,
                found: p.dim(),
            });
        }
        if !seen.insert(p.label()) {
            return Err(Error::Input(format!("duplicate point label {:?}", p.label())));
        }
    }
    Ok(k)
}

/// Objectives are finite, so `partial_cmp` is total here and, unlike
/// `total_cmp`, treats `-0.0` and `0.0` as equal.
fn cmp(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).expect("objectives are finite")
}

/// Sort-and-sweep for k ≤ 2. Returns a dominated flag per input index.
fn sweep(points: &[EvalPoint]) -> Vec<bool> {
    let key = |i: usize| {
        let o = points[i].objectives();
        (o[0], o.get(1).copied().unwrap_or(0.0))
    };
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (a1, a2) = key(a);
        let (b1, b2) = key(b);
        cmp(a1, b1).then(cmp(a2, b2))
    });

    let mut dominated = vec![false; points.len()];
    // Smallest second objective among points with a strictly smaller first.
    let mut best_before = f64::INFINITY;
    let mut start = 0;
    while start < order.len() {
        let (f1, group_min) = key(order[start]);
        let mut end = start;
        while end < order.len() && key(order[end]).0 == f1 {
            end += 1;
        }
        for &i in &order[start..end] {
            let f2 = key(i).1;
            dominated[i] = best_before <= f2 || group_min < f2;
        }
        best_before = best_before.min(group_min);
        start = end;
    }
    dominated
}

/// Pairwise scan for any k; each point is checked against all others.
fn scan(points: &[EvalPoint]) -> Vec<bool> {
    let is_dominated = |i: usize| {
        let b = points[i].objectives();
        points
            .iter()
            .any(|p| dominates_unchecked(p.objectives(), b))
    };
    if points.len() >= PARALLEL_THRESHOLD {
        (0..points.len()).into_par_iter().map(is_dominated).collect()
    } else {
        (0..points.len()).map(is_dominated).collect()
    }
}

/// Indices of the non-dominated points, ascending.
pub fn non_dominated_indices(points: &[EvalPoint]) -> Result<Vec<usize>> {
    let k = check_points(points)?;
    let dominated = if k <= 2 { sweep(points) } else { scan(points) };
    Ok((0..points.len()).filter(|&i| !dominated[i]).collect())
}

pub fn pareto_front(points: &[EvalPoint]) -> Result<FrontResult> {
    let optimal_idx = non_dominated_indices(points)?;
    let mut is_optimal = vec![false; points.len()];
    for &i in &optimal_idx {
        is_optimal[i] = true;
    }
    let dominators_of = |i: usize| Dominated {
        label: points[i].label().to_string(),
        dominators: points
            .iter()
            .filter(|p| dominates_unchecked(p.objectives(), points[i].objectives()))
            .map(|p| p.label().to_string())
            .collect(),
    };
    let dominated_idx: Vec<usize> = (0..points.len()).filter(|&i| !is_optimal[i]).collect();
    let dominated = if points.len() >= PARALLEL_THRESHOLD {
        dominated_idx.par_iter().map(|&i| dominators_of(i)).collect()
    } else {
        dominated_idx.iter().map(|&i| dominators_of(i)).collect()
    };
    Ok(FrontResult {
        optimal: optimal_idx
            .into_iter()
            .map(|i| points[i].label().to_string())
            .collect(),
        dominated,
    })
}

/// `m[i][j] = dominates(points[i], points[j])`.
pub fn dominance_matrix(points: &[EvalPoint]) -> Result<Vec<Vec<bool>>> {
    check_points(points)?;
    Ok(points
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|b| dominates_unchecked(a.objectives(), b.objectives()))
                .collect()
        })
        .collect())
}
