//! Exact count of non-negative integer matrices with given margins.
//!
//! Columns are filled one at a time. The state is the multiset of residual
//! row sums (zeros dropped, sorted descending): rows with equal residuals
//! are exchangeable, so one column step enumerates how many rows of each
//! residual class receive each amount, weighted by binomial coefficients.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{binomial, Budget, ExactCount};
use crate::error::{Error, Result};

type State = Vec<u64>;

fn canonical(mut values: Vec<u64>) -> State {
    values.retain(|&x| x > 0);
    values.sort_unstable_by(|a, b| b.cmp(a));
    values
}

fn groups(state: &[u64]) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    for &x in state {
        match out.last_mut() {
            Some((v, k)) if *v == x => *k += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

struct ColumnStep<'a, F: FnMut(State, &BigUint)> {
    groups: &'a [(u64, u64)],
    /// `capacity[g]` is the most that groups `g..` can absorb.
    capacity: Vec<u64>,
    acc: Vec<u64>,
    emit: F,
    /// Transitions still allowed; the step stops early when it reaches zero.
    remaining: usize,
}

impl<F: FnMut(State, &BigUint)> ColumnStep<'_, F> {
    fn group(&mut self, g: usize, rem: u64, weight: &BigUint) {
        if self.remaining == 0 {
            return;
        }
        if g == self.groups.len() {
            if rem == 0 {
                self.remaining -= 1;
                (self.emit)(canonical(self.acc.clone()), weight);
            }
            return;
        }
        if rem > self.capacity[g] {
            return;
        }
        let (r, k) = self.groups[g];
        self.pattern(g, r, k, r.min(rem), rem, weight);
    }

    /// Assign amounts `≤ top` to `left` rows of residual `r` in group `g`.
    fn pattern(&mut self, g: usize, r: u64, left: u64, top: u64, rem: u64, weight: &BigUint) {
        if self.remaining == 0 {
            return;
        }
        if top == 0 || left == 0 {
            let mark = self.acc.len();
            self.acc.extend(std::iter::repeat_n(r, left as usize));
            self.group(g + 1, rem, weight);
            self.acc.truncate(mark);
            return;
        }
        for cnt in 0..=left.min(rem / top) {
            let mark = self.acc.len();
            self.acc.extend(std::iter::repeat_n(r - top, cnt as usize));
            let w = weight * binomial(left, cnt);
            let rem_next = rem - cnt * top;
            self.pattern(g, r, left - cnt, (top - 1).min(rem_next), rem_next, &w);
            self.acc.truncate(mark);
        }
    }
}

/// Number of non-negative integer matrices with row sums `rows` and column
/// sums `cols`.
pub fn exact_count_tables(rows: &[u64], cols: &[u64], budget: &Budget) -> Result<ExactCount> {
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::InfeasibleMargins("rows and cols must be non-empty".into()));
    }
    let description = format!("{}x{} tables rows={rows:?} cols={cols:?}", rows.len(), cols.len());
    if rows.iter().sum::<u64>() != cols.iter().sum::<u64>() {
        return Err(Error::InfeasibleMargins("row and column totals differ".into()));
    }
    // fewer rows means fewer residual states
    let (rows, cols) = if rows.len() > cols.len() {
        (cols, rows)
    } else {
        (rows, cols)
    };
    let mut cols = cols.to_vec();
    cols.sort_unstable_by(|a, b| b.cmp(a));

    let mut layer: HashMap<State, BigUint> = HashMap::new();
    layer.insert(canonical(rows.to_vec()), BigUint::one());
    let mut peak = 1;
    let mut remaining = budget.max_transitions();
    // the final column is forced: it takes every remaining residual
    for &c in &cols[..cols.len() - 1] {
        let mut next: HashMap<State, BigUint> = HashMap::new();
        for (state, count) in &layer {
            let groups = groups(state);
            let mut capacity = vec![0u64; groups.len() + 1];
            for g in (0..groups.len()).rev() {
                capacity[g] = capacity[g + 1] + groups[g].0.min(c) * groups[g].1;
            }
            let mut step = ColumnStep {
                groups: &groups,
                capacity,
                acc: Vec::with_capacity(state.len()),
                emit: |new_state: State, weight: &BigUint| {
                    *next.entry(new_state).or_insert_with(BigUint::zero) += count * weight;
                },
                remaining,
            };
            step.group(0, c, &BigUint::one());
            remaining = step.remaining;
            if remaining == 0 || next.len() > budget.max_states {
                return Err(budget.exceeded());
            }
        }
        peak = peak.max(next.len());
        layer = next;
    }
    let value = layer.into_values().fold(BigUint::zero(), |acc, x| acc + x);
    Ok(ExactCount::new(value, description, peak))
}
