//! Brute-force enumeration of bijective maps `f: A -> B` with
//! `q_B(f(x)) = sign * q_A(x)`.
//!
//! Candidate images for each generator are scanned in lexicographic order of
//! coefficient vectors, so the first map produced is the lexicographically
//! smallest one.

use std::ops::ControlFlow;
use std::sync::Arc;

use super::map::generates;
use super::{FiniteFormMap, FiniteQuadraticForm, Sign};
use crate::error::Result;

/// Necessary for any bijection; equal exponents also make the scaled value
/// tables of the two forms directly comparable.
fn comparable(a: &FiniteQuadraticForm, b: &FiniteQuadraticForm) -> bool {
    a.order() == b.order() && a.exponent() == b.exponent()
}

fn signed(v: u64, m: u64, sign: Sign) -> u64 {
    match sign {
        Sign::Plus => v % m,
        Sign::Minus => (m - v % m) % m,
    }
}

/// Visits every bijective signed isometry in lexicographic order until the
/// visitor breaks.
fn for_each_isometry<F>(
    a: &Arc<FiniteQuadraticForm>,
    b: &Arc<FiniteQuadraticForm>,
    sign: Sign,
    cap: u64,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(Vec<Vec<u64>>) -> ControlFlow<()>,
{
    a.order_within(cap)?;
    b.order_within(cap)?;
    if !comparable(a, b) {
        return Ok(());
    }
    let k = a.num_generators();
    if k == 0 {
        // Both trivial.
        let _ = visit(vec![]);
        return Ok(());
    }
    let e = a.exponent();
    let candidates: Vec<Vec<Vec<u64>>> = (0..k)
        .map(|i| {
            let want = signed(a.q_scaled_gen(i), 2 * e, sign);
            let d = a.orders()[i];
            b.elements()
                .filter(|y| b.is_killed_by(d, y) && b.q_scaled_of(y) == want)
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(());
    }

    let mut choice = vec![0usize; k];
    let mut level = 0usize;
    loop {
        // Find a candidate at `level` consistent with earlier choices.
        let mut found = false;
        while choice[level] < candidates[level].len() {
            let y = &candidates[level][choice[level]];
            let ok = (0..level).all(|j| {
                let yj = &candidates[j][choice[j]];
                b.b_scaled_of(yj, y) == signed(a.b_scaled_gen(j, level), e, sign)
            });
            if ok {
                found = true;
                break;
            }
            choice[level] += 1;
        }
        if found {
            if level + 1 == k {
                let images: Vec<Vec<u64>> = (0..k).map(|j| candidates[j][choice[j]].clone()).collect();
                if generates(&images, b.orders()) && visit(images).is_break() {
                    return Ok(());
                }
                choice[level] += 1;
            } else {
                level += 1;
                choice[level] = 0;
            }
        } else {
            if level == 0 {
                return Ok(());
            }
            level -= 1;
            choice[level] += 1;
        }
    }
}

/// All bijective maps `f: A -> B` with `q_B ∘ f = sign * q_A`.
pub fn isometries_signed(
    a: &Arc<FiniteQuadraticForm>,
    b: &Arc<FiniteQuadraticForm>,
    sign: Sign,
    cap: u64,
) -> Result<Vec<FiniteFormMap>> {
    let mut out = Vec::new();
    for_each_isometry(a, b, sign, cap, |images| {
        out.push(FiniteFormMap::from_parts_unchecked(a.clone(), b.clone(), images, sign));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// The lexicographically first signed isometry, if any.
pub fn first_isometry(
    a: &Arc<FiniteQuadraticForm>,
    b: &Arc<FiniteQuadraticForm>,
    sign: Sign,
    cap: u64,
) -> Result<Option<FiniteFormMap>> {
    let mut out = None;
    for_each_isometry(a, b, sign, cap, |images| {
        out = Some(FiniteFormMap::from_parts_unchecked(a.clone(), b.clone(), images, sign));
        ControlFlow::Break(())
    })?;
    Ok(out)
}

pub fn are_isometric(a: &Arc<FiniteQuadraticForm>, b: &Arc<FiniteQuadraticForm>, cap: u64) -> Result<bool> {
    Ok(first_isometry(a, b, Sign::Plus, cap)?.is_some())
}
