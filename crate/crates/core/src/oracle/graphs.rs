//! Exact count of labeled simple graphs with a given degree sequence.
//!
//! The vertex with the largest residual degree is removed together with its
//! neighborhood. Vertices with equal residual degree are exchangeable, so the
//! neighborhood is chosen class by class with binomial weights, and states
//! are memoized on the sorted residual multiset.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{binomial, Budget, ExactCount};
use crate::error::Result;

type State = Vec<u64>;

fn canonical(mut values: Vec<u64>) -> State {
    values.retain(|&x| x > 0);
    values.sort_unstable_by(|a, b| b.cmp(a));
    values
}

/// Erdős–Gallai test on a degree sequence sorted in descending order.
pub fn erdos_gallai(sorted_desc: &[u64]) -> bool {
    let n = sorted_desc.len();
    if sorted_desc.iter().sum::<u64>() % 2 == 1 {
        return false;
    }
    let mut prefix = 0u64;
    for k in 1..=n {
        prefix += sorted_desc[k - 1];
        let kk = k as u64;
        let tail: u64 = sorted_desc[k..].iter().map(|&d| d.min(kk)).sum();
        if prefix > kk * (kk - 1) + tail {
            return false;
        }
    }
    true
}

struct Counter {
    memo: HashMap<State, BigUint>,
    budget: Budget,
    transitions: usize,
}

impl Counter {
    fn count(&mut self, state: State) -> Result<BigUint> {
        if state.is_empty() {
            return Ok(BigUint::one());
        }
        if let Some(v) = self.memo.get(&state) {
            return Ok(v.clone());
        }
        let value = if erdos_gallai(&state) {
            self.expand(&state)?
        } else {
            BigUint::zero()
        };
        if self.memo.len() >= self.budget.max_states {
            return Err(self.budget.exceeded());
        }
        self.memo.insert(state, value.clone());
        Ok(value)
    }

    fn expand(&mut self, state: &[u64]) -> Result<BigUint> {
        let degree = state[0];
        let mut groups: Vec<(u64, u64)> = Vec::new();
        for &x in &state[1..] {
            match groups.last_mut() {
                Some((v, k)) if *v == x => *k += 1,
                _ => groups.push((x, 1)),
            }
        }
        let mut total = BigUint::zero();
        let mut picks = vec![0u64; groups.len()];
        self.choose(&groups, 0, degree, &mut picks, &mut total)?;
        Ok(total)
    }

    fn choose(
        &mut self,
        groups: &[(u64, u64)],
        g: usize,
        rem: u64,
        picks: &mut Vec<u64>,
        total: &mut BigUint,
    ) -> Result<()> {
        if g == groups.len() {
            if rem > 0 {
                return Ok(());
            }
            self.transitions += 1;
            if self.transitions > self.budget.max_transitions() {
                return Err(self.budget.exceeded());
            }
            let mut next = Vec::new();
            let mut weight = BigUint::one();
            for (&(r, k), &p) in groups.iter().zip(picks.iter()) {
                weight *= binomial(k, p);
                next.extend(std::iter::repeat_n(r - 1, p as usize));
                next.extend(std::iter::repeat_n(r, (k - p) as usize));
            }
            let sub = self.count(canonical(next))?;
            *total += weight * sub;
            return Ok(());
        }
        let capacity: u64 = groups[g..].iter().map(|&(_, k)| k).sum();
        if rem > capacity {
            return Ok(());
        }
        let (_, k) = groups[g];
        for p in 0..=k.min(rem) {
            picks[g] = p;
            self.choose(groups, g + 1, rem - p, picks, total)?;
        }
        picks[g] = 0;
        Ok(())
    }
}

/// Number of labeled simple graphs on `degrees.len()` vertices with the
/// given degrees. Zero when the sum is odd or the sequence is not graphic.
pub fn exact_count_graphs(degrees: &[u64], budget: &Budget) -> Result<ExactCount> {
    let n = degrees.len() as u64;
    let description = format!("graphs on {n} vertices degrees={degrees:?}");
    if degrees.iter().sum::<u64>() % 2 == 1 || degrees.iter().any(|&d| d >= n.max(1)) {
        return Ok(ExactCount::new(BigUint::zero(), description, 0));
    }
    let mut counter = Counter {
        memo: HashMap::new(),
        budget: *budget,
        transitions: 0,
    };
    let value = counter.count(canonical(degrees.to_vec()))?;
    Ok(ExactCount::new(value, description, counter.memo.len()))
}
