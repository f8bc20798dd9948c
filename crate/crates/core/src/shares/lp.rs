//! Exact fractional packing over rationals.
//!
//! Solves `max sum_S y_S` subject to `sum_{S ∋ t} y_S <= w_t` and `y >= 0`,
//! where every `S` is a nonempty set of rows and every `w_t > 0`. The origin is
//! feasible, so a primal simplex from the slack basis needs no phase one.
//! Bland's rule keeps it from cycling.

use num_traits::{One, Signed, Zero};

use crate::model::Bundle;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingSolution {
    pub optimum: Rational,
    /// Optimal dual prices, one per row: `duals · w = optimum` and
    /// `sum_{t in S} duals_t >= 1` for every column `S`.
    pub duals: Vec<Rational>,
}

pub fn solve_packing(sets: &[Bundle], weights: &[Rational]) -> PackingSolution {
    let m = weights.len();
    let cols = sets.len() + m;
    // tableau rows 0..m are constraints, row m is the objective; last column is the rhs
    let mut tab = vec![vec![Rational::zero(); cols + 1]; m + 1];
    for (c, s) in sets.iter().enumerate() {
        debug_assert!(!s.is_empty());
        for t in s.iter() {
            tab[t][c] = Rational::one();
        }
        tab[m][c] = -Rational::one();
    }
    for t in 0..m {
        tab[t][sets.len() + t] = Rational::one();
        tab[t][cols] = weights[t].clone();
    }
    let mut basis: Vec<usize> = (sets.len()..cols).collect();

    while let Some(enter) = (0..cols).find(|&c| tab[m][c].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for r in 0..m {
            if !tab[r][enter].is_positive() {
                continue;
            }
            let ratio = &tab[r][cols] / &tab[r][enter];
            let better = match &leave {
                None => true,
                Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        // columns are bounded by the positive weights, so a leaving row always exists
        let (row, _) = leave.expect("packing is bounded");
        pivot(&mut tab, row, enter);
        basis[row] = enter;
    }

    PackingSolution {
        optimum: tab[m][cols].clone(),
        duals: (0..m).map(|t| tab[m][sets.len() + t].clone()).collect(),
    }
}

fn pivot(tab: &mut [Vec<Rational>], row: usize, col: usize) {
    let p = tab[row][col].clone();
    for x in tab[row].iter_mut() {
        if !x.is_zero() {
            *x /= &p;
        }
    }
    let pivot_row = tab[row].clone();
    for (r, line) in tab.iter_mut().enumerate() {
        if r == row || line[col].is_zero() {
            continue;
        }
        let f = line[col].clone();
        for (x, y) in line.iter_mut().zip(&pivot_row) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
    }
}
