//! Discrete line searches for the maximum of a score over integer sizes.
//!
//! Both searches cache every probe, so no size is scored twice, and hand the
//! probe an *anchor*: the already-scored size whose feature ranking the new
//! subset should be truncated from. Plain integer oracles ignore it.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Scores one size. `anchor` is a previously scored size no smaller than
/// `size` (or the upper end of the search interval).
pub trait SizeProbe {
    fn probe(&mut self, size: usize, anchor: usize) -> Result<f64>;
}

/// Adapts a plain `size -> score` function.
pub struct FnProbe<F>(pub F);

impl<F: FnMut(usize) -> f64> SizeProbe for FnProbe<F> {
    fn probe(&mut self, size: usize, _anchor: usize) -> Result<f64> {
        Ok((self.0)(size))
    }
}

/// Where a line search ended and how it got there.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    pub best: usize,
    /// Sizes scored during the search, in probe order, excluding sizes that
    /// were already known when the search started.
    pub probes: Vec<usize>,
    /// Closed interval still searched after each iteration.
    pub intervals: Vec<(usize, usize)>,
}

/// Score cache wrapped around a probe.
pub(crate) struct Memo<'a, P> {
    probe: &'a mut P,
    scores: BTreeMap<usize, f64>,
    probes: Vec<usize>,
}

impl<'a, P: SizeProbe> Memo<'a, P> {
    pub(crate) fn new(probe: &'a mut P, known: BTreeMap<usize, f64>) -> Self {
        Memo { probe, scores: known, probes: Vec::new() }
    }

    fn score(&mut self, size: usize, anchor: usize) -> Result<f64> {
        if let Some(&s) = self.scores.get(&size) {
            return Ok(s);
        }
        let s = self.probe.probe(size, anchor)?;
        self.scores.insert(size, s);
        self.probes.push(size);
        Ok(s)
    }

    fn contains(&self, size: usize) -> bool {
        self.scores.contains_key(&size)
    }

    fn next_larger(&self, size: usize) -> Option<usize> {
        self.scores.range(size + 1..).next().map(|(&s, _)| s)
    }
}

/// `[1, 1, 2, 3, 5, …]` up to and including the first value greater than `m`.
pub fn fibonacci_upto(m: usize) -> Result<Vec<usize>> {
    if m == 0 {
        return Err(Error::domain("fibonacci_upto needs m >= 1"));
    }
    let mut fibs = vec![1usize, 1];
    while *fibs.last().expect("non-empty") <= m {
        let next = fibs[fibs.len() - 1] + fibs[fibs.len() - 2];
        fibs.push(next);
    }
    Ok(fibs)
}

fn check_interval(lower: usize, upper: usize) -> Result<()> {
    if lower >= upper {
        return Err(Error::domain(format!("empty search interval [{lower}, {upper}]")));
    }
    Ok(())
}

/// Fibonacci search for the maximum on `[lower, upper]`.
///
/// Probes sit at `lower + F[n-2]` and `lower + F[n-1]` where `F[n]` is the
/// first Fibonacci number exceeding `upper - lower`. The bracket therefore
/// starts as `[lower, lower + F[n]]`, which may reach past `upper`; probes
/// beyond `upper` score as −∞ without being evaluated. A tie between the two
/// probes shrinks the bracket towards smaller sizes. `F[-1]` is taken as 0 so
/// the last iteration probes `lower` itself.
pub(crate) fn fibonacci_core<P: SizeProbe>(memo: &mut Memo<'_, P>, lower: usize, upper: usize) -> Result<LineSearchOutcome> {
    check_interval(lower, upper)?;
    let fibs = fibonacci_upto(upper - lower)?;
    let fib = |i: isize| if i < 0 { 0 } else { fibs[i as usize] };
    let mut n = fibs.len() as isize - 1;

    let mut lo = lower;
    let mut hi = lower + fibs[n as usize];
    let anchor = |hi: usize| hi.min(upper);
    let score = |memo: &mut Memo<'_, P>, x: usize, hi: usize| -> Result<f64> {
        if x > upper {
            Ok(f64::NEG_INFINITY)
        } else {
            memo.score(x, anchor(hi))
        }
    };

    let mut x1 = lo + fib(n - 2);
    let mut x2 = lo + fib(n - 1);
    let mut y1 = score(memo, x1, hi)?;
    let mut y2 = score(memo, x2, hi)?;
    let mut intervals = Vec::new();

    while hi - lo > 1 {
        n -= 1;
        if y1 < y2 {
            lo = x1;
            x1 = x2;
            y1 = y2;
            x2 = lo + fib(n - 1);
            y2 = score(memo, x2, hi)?;
        } else {
            hi = x2;
            x2 = x1;
            y2 = y1;
            x1 = lo + fib(n - 2);
            y1 = score(memo, x1, hi)?;
        }
        intervals.push((lo, hi.min(upper)));
    }

    let best = if y1 < y2 { x2 } else { x1 };
    Ok(LineSearchOutcome { best, probes: memo.probes.clone(), intervals })
}

/// k-subsecting search for the maximum on `[lower, upper]`.
///
/// Each sweep walks down from the current upper end in steps of `step`,
/// clamping the last point to the lower end, and keeps the best point of the
/// sweep (the starting upper end included; ties go to the smaller size). The
/// interval then becomes `[best - step, best + step]` clipped to the initial
/// bounds and the step shrinks to `min(⌊(upper - lower)/k⌋, step - 1)`, or to
/// 1 when that quotient is zero. A sweep with step 1 is always the last one.
pub(crate) fn ksubsect_core<P: SizeProbe>(memo: &mut Memo<'_, P>, lower: usize, upper: usize, k: usize) -> Result<LineSearchOutcome> {
    check_interval(lower, upper)?;
    if k < 2 {
        return Err(Error::domain("k-subsecting search needs k >= 2"));
    }
    let (lo0, hi0, k) = (lower as i64, upper as i64, k as i64);
    let mut lo = lo0;
    let mut hi = hi0;
    let mut step = ((hi + lo) / k).max(1);
    let mut best = upper;
    let mut intervals = Vec::new();

    while step > 0 {
        let start = hi as usize;
        if !memo.contains(start) {
            let anchor = memo.next_larger(start).unwrap_or(upper);
            memo.score(start, anchor)?;
        }
        let mut sweep = vec![(start, memo.score(start, start)?)];
        let mut prev = hi;
        let mut mid = hi - step;
        while mid > lo - step {
            mid = mid.max(lo);
            let s = memo.score(mid as usize, prev as usize)?;
            sweep.push((mid as usize, s));
            prev = mid;
            mid = prev - step;
        }
        best = sweep
            .iter()
            .copied()
            .reduce(|a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a })
            .expect("sweep includes its start")
            .0;

        let b = best as i64;
        lo = if b - step > lo0 { b - step } else { lo0 };
        hi = if b + step < hi0 { b + step } else { hi0 };
        let span = (hi - lo) / k;
        step = if step > 1 && span == 0 { 1 } else { span.min(step - 1) };
        intervals.push((lo as usize, hi as usize));
    }
    Ok(LineSearchOutcome { best, probes: memo.probes.clone(), intervals })
}

/// Fibonacci search over a plain oracle; see [`fibonacci_search_traced`].
pub fn fibonacci_search<F: FnMut(usize) -> f64>(score: F, lower: usize, upper: usize) -> Result<usize> {
    fibonacci_search_traced(score, lower, upper).map(|o| o.best)
}

/// Fibonacci search returning the probes and intermediate brackets. If the
/// oracle is unimodal on `[lower, upper]`, `best` is its argmax.
pub fn fibonacci_search_traced<F: FnMut(usize) -> f64>(score: F, lower: usize, upper: usize) -> Result<LineSearchOutcome> {
    let mut probe = FnProbe(score);
    let mut memo = Memo::new(&mut probe, BTreeMap::new());
    fibonacci_core(&mut memo, lower, upper)
}

/// k-subsecting search over a plain oracle.
pub fn ksubsect_search<F: FnMut(usize) -> f64>(score: F, lower: usize, upper: usize, k: usize) -> Result<usize> {
    ksubsect_search_traced(score, lower, upper, k).map(|o| o.best)
}

pub fn ksubsect_search_traced<F: FnMut(usize) -> f64>(
    score: F,
    lower: usize,
    upper: usize,
    k: usize,
) -> Result<LineSearchOutcome> {
    let mut probe = FnProbe(score);
    let mut memo = Memo::new(&mut probe, BTreeMap::new());
    ksubsect_core(&mut memo, lower, upper, k)
}
