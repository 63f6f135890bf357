//! Brute-force reference values for checking the kernel.
//!
//! Nothing in the production path calls into this module. The direct sum
//! works term by term in log space with compensated accumulation; the linear
//! three-term recurrence is kept only to show where it stops working.

use crate::error::{Error, Result};
use crate::kernel::DistParams;

/// Largest `x` accepted by [`direct_pmf`] and [`poisson_reference`].
pub const ORACLE_MAX_X: u64 = 2000;

/// Largest `lambda` accepted by [`evens_pmf_table`]; beyond it `exp(-lambda)`
/// is close to the bottom of the normal f64 range.
pub const EVENS_MAX_LAMBDA: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    DirectSum,
    EvensRecurrence,
    PoissonReference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub x: u64,
    pub value: f64,
    pub ln_value: f64,
    pub method: OracleMethod,
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `log n!` for `n = 0..=nmax` as unevaluated (hi, lo) pairs.
fn ln_factorials(nmax: u64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(nmax as usize + 1);
    let mut acc = Compensated::default();
    out.push((0.0, 0.0));
    for k in 1..=nmax {
        acc.add((k as f64).ln());
        out.push((acc.sum, acc.comp));
    }
    out
}

fn check_range(x: u64) -> Result<()> {
    if x > ORACLE_MAX_X {
        return Err(Error::OracleRange(format!(
            "x = {x} exceeds the direct-sum limit {ORACLE_MAX_X}"
        )));
    }
    Ok(())
}

/// Compensated log-sum-exp.
fn log_sum_exp(exponents: &[f64]) -> f64 {
    let max = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let mut acc = Compensated::default();
    for &e in exponents {
        acc.add((e - max).exp());
    }
    max + acc.value().ln()
}

/// `P(X = x)` by the explicit sum over the number of clumps,
/// `exp(-lambda) sum_{n=1}^{x} lambda^n / n! C(x-1, n-1) p^(x-n) (1-p)^n`.
pub fn direct_pmf(x: u64, params: DistParams) -> Result<OracleResult> {
    check_range(x)?;
    let lambda = params.lambda();
    let p = params.prob();
    let ln_value = if x == 0 {
        -lambda
    } else if lambda == 0.0 {
        f64::NEG_INFINITY
    } else {
        let lf = ln_factorials(x);
        let (ln_lambda, ln_p, ln_q) = (lambda.ln(), p.ln(), (-p).ln_1p());
        let first = if p == 0.0 { x } else { 1 };
        let exponents: Vec<f64> = (first..=x)
            .map(|n| {
                let mut e = Compensated::default();
                e.add(-lambda);
                e.add(n as f64 * ln_lambda);
                for (sign, idx) in [(-1.0, n), (1.0, x - 1), (-1.0, n - 1), (-1.0, x - n)] {
                    let (hi, lo) = lf[idx as usize];
                    e.add(sign * hi);
                    e.add(sign * lo);
                }
                if x > n {
                    e.add((x - n) as f64 * ln_p);
                }
                e.add(n as f64 * ln_q);
                e.value()
            })
            .collect();
        log_sum_exp(&exponents)
    };
    Ok(OracleResult {
        x,
        value: ln_value.exp(),
        ln_value,
        method: OracleMethod::DirectSum,
    })
}

/// Linear-space three-term recurrence
/// `(x+1) P(x+1) = [lambda(1-p) + 2px] P(x) - p^2 (x-1) P(x-1)`.
///
/// Starts from `P(0) = exp(-lambda)`, so it is only usable while that is a
/// normal float; larger `lambda` is refused with a range error.
pub fn evens_pmf_table(params: DistParams, xmax: u64) -> Result<Vec<f64>> {
    let lambda = params.lambda();
    let p = params.prob();
    let p0 = (-lambda).exp();
    if lambda > EVENS_MAX_LAMBDA || p0 < f64::MIN_POSITIVE {
        return Err(Error::OracleRange(format!(
            "exp(-{lambda}) is not representable for the linear recurrence (limit lambda <= {EVENS_MAX_LAMBDA})"
        )));
    }
    let mut out = Vec::with_capacity(xmax as usize + 1);
    out.push(p0);
    if xmax >= 1 {
        out.push(lambda * (1.0 - p) * p0);
    }
    for x in 1..xmax {
        let xf = x as f64;
        let next = ((lambda * (1.0 - p) + 2.0 * p * xf) * out[x as usize]
            - p * p * (xf - 1.0) * out[x as usize - 1])
            / (xf + 1.0);
        out.push(next);
    }
    Ok(out)
}

fn poisson_ln_pmf(x: u64, lambda: f64, lf: &[(f64, f64)]) -> f64 {
    if lambda == 0.0 {
        return if x == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let mut e = Compensated::default();
    e.add(-lambda);
    e.add(x as f64 * lambda.ln());
    let (hi, lo) = lf[x as usize];
    e.add(-hi);
    e.add(-lo);
    e.value()
}

/// Poisson(`lambda`) mass at `x`.
pub fn poisson_reference(x: u64, lambda: f64) -> Result<OracleResult> {
    check_range(x)?;
    let lf = ln_factorials(x);
    let ln_value = poisson_ln_pmf(x, lambda, &lf);
    Ok(OracleResult {
        x,
        value: ln_value.exp(),
        ln_value,
        method: OracleMethod::PoissonReference,
    })
}

/// `log P(N <= x)` for `N ~ Poisson(lambda)`.
pub fn poisson_ln_cdf(x: u64, lambda: f64) -> Result<f64> {
    check_range(x)?;
    let lf = ln_factorials(x);
    let exps: Vec<f64> = (0..=x).map(|i| poisson_ln_pmf(i, lambda, &lf)).collect();
    Ok(log_sum_exp(&exps))
}

/// `log P(N > x)` for `N ~ Poisson(lambda)`, summing upward from `x + 1`
/// with the term ratio `lambda / i` until the terms vanish against the sum.
pub fn poisson_ln_survival(x: u64, lambda: f64) -> Result<f64> {
    check_range(x)?;
    if lambda == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let lf = ln_factorials(x + 1);
    let first = poisson_ln_pmf(x + 1, lambda, &lf);
    let mut acc = Compensated::default();
    let mut term = 1.0_f64;
    let mut i = x + 1;
    // Terms grow while i < lambda; rescale so the running sum never overflows.
    let mut shift = 0.0_f64;
    loop {
        acc.add(term);
        i += 1;
        term *= lambda / i as f64;
        if term > 1e250 {
            shift += term.ln();
            acc = Compensated {
                sum: acc.sum / term,
                comp: acc.comp / term,
            };
            term = 1.0;
        }
        if (i as f64) > lambda && term < 1e-20 * acc.value() {
            break;
        }
    }
    Ok(first + shift + acc.value().ln())
}
