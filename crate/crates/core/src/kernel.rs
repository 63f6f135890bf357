//! Log-space recurrences for the mass function and both distribution tails.
//!
//! Everything here works on `l(x) = log P(X = x)` and never forms a linear
//! probability, so tables stay finite far beyond the range where `P(X = x)`
//! underflows.

use crate::error::{Error, Result};

/// Largest table index any operation will allocate.
pub const MAX_XMAX: usize = 1 << 24;

/// Iteration cap for the upper-tail series.
pub const TAIL_MAX_TERMS: usize = 1_000_000;

/// The upper-tail series stops once this many consecutive terms are negligible.
const TAIL_NEGLIGIBLE_RUN: usize = 3;

/// Distance of the first survival anchor above the mean, in standard deviations.
const TAIL_ANCHOR_SIGMAS: f64 = 40.0;

/// Parameters `(lambda, prob)` of one Pólya-Aeppli distribution.
///
/// `lambda` is the Poisson rate of the number of clumps and `prob` the
/// parameter of the shifted geometric clump size, `P(Y = y) = prob^(y-1) (1 - prob)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistParams {
    lambda: f64,
    prob: f64,
}

impl DistParams {
    /// Requires `lambda >= 0` and finite, `0 <= prob < 1`. `lambda = 0` is the
    /// point mass at zero; `prob = 0` is Poisson(`lambda`).
    pub fn new(lambda: f64, prob: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                reason: "must be finite and non-negative",
            });
        }
        if !(0.0..1.0).contains(&prob) {
            return Err(Error::InvalidParameter {
                name: "prob",
                value: prob,
                reason: "must lie in [0, 1)",
            });
        }
        Ok(Self { lambda, prob })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn prob(&self) -> f64 {
        self.prob
    }

    pub fn mean(&self) -> f64 {
        self.lambda / (1.0 - self.prob)
    }

    pub fn variance(&self) -> f64 {
        let q = 1.0 - self.prob;
        self.lambda * (1.0 + self.prob) / (q * q)
    }
}

/// Stepping state of the log-pmf recurrence.
///
/// `l(x)` is kept as a compensated running sum of the increments
/// `l(x) - l(x - 1)`; the increment is also what feeds the
/// `exp(l(x - 1) - l(x))` factor of the next step.
#[derive(Debug, Clone)]
struct Recurrence {
    params: DistParams,
    next: usize,
    sum: f64,
    comp: f64,
    inc: f64,
}

impl Recurrence {
    fn new(params: DistParams) -> Self {
        Self {
            params,
            next: 0,
            sum: 0.0,
            comp: 0.0,
            inc: 0.0,
        }
    }

    /// Returns `l(x)` for `x = 0, 1, 2, ...` in turn.
    fn step(&mut self) -> f64 {
        let x = self.next;
        self.next += 1;
        let lambda = self.params.lambda;
        let p = self.params.prob;

        if x == 0 {
            self.sum = -lambda;
            self.comp = 0.0;
            return self.sum;
        }
        if lambda == 0.0 {
            return f64::NEG_INFINITY;
        }

        // Transition from l(x - 1) to l(x).
        let prev = (x - 1) as f64;
        let inc = if x == 1 {
            (lambda * (1.0 - p)).ln()
        } else if p == 0.0 {
            (lambda / x as f64).ln()
        } else {
            let num = lambda * (1.0 - p) + 2.0 * p * prev - p * p * (prev - 1.0) * (-self.inc).exp();
            (num / x as f64).ln()
        };
        self.inc = inc;

        // Neumaier summation
        let t = self.sum + inc;
        if self.sum.abs() >= inc.abs() {
            self.comp += (self.sum - t) + inc;
        } else {
            self.comp += (inc - t) + self.sum;
        }
        self.sum = t;
        self.sum + self.comp
    }
}

/// `l(x) = log P(X = x)` for `x = 0..=xmax`.
#[derive(Debug, Clone)]
pub struct LogPmfTable {
    logp: Vec<f64>,
    state: Recurrence,
}

impl LogPmfTable {
    pub fn new(params: DistParams, xmax: usize) -> Result<Self> {
        let mut table = Self {
            logp: Vec::new(),
            state: Recurrence::new(params),
        };
        table.extend_to(xmax)?;
        Ok(table)
    }

    /// Grows the table in place; values already present are untouched.
    pub fn extend_to(&mut self, xmax: usize) -> Result<()> {
        check_xmax(xmax)?;
        if xmax < self.logp.len() {
            return Ok(());
        }
        self.logp.reserve(xmax + 1 - self.logp.len());
        while self.logp.len() <= xmax {
            let v = self.state.step();
            self.logp.push(v);
        }
        Ok(())
    }

    pub fn params(&self) -> DistParams {
        self.state.params
    }

    pub fn xmax(&self) -> usize {
        self.logp.len() - 1
    }

    pub fn logp(&self) -> &[f64] {
        &self.logp
    }

    /// `l(xmax + 1), l(xmax + 2), ...`, continuing the recurrence exactly as a
    /// longer table would have.
    pub fn continuation(&self) -> impl Iterator<Item = f64> {
        let mut state = self.state.clone();
        std::iter::repeat_with(move || state.step())
    }

    /// `l(start), l(start + 1), ...` read from the table and then the continuation.
    fn values_from(&self, start: usize) -> impl Iterator<Item = f64> + '_ {
        self.logp.iter().copied().chain(self.continuation()).skip(start)
    }
}

pub(crate) fn check_xmax(xmax: usize) -> Result<()> {
    if xmax > MAX_XMAX {
        return Err(Error::TableTooLarge {
            requested: xmax as f64,
            limit: MAX_XMAX,
        });
    }
    Ok(())
}

/// Builds the log-pmf table out to `xmax`.
pub fn log_pmf_table(params: DistParams, xmax: usize) -> Result<LogPmfTable> {
    LogPmfTable::new(params, xmax)
}

/// One step of the lower-tail recurrence: `g(i + 1)` from `g(i)` and `l(i + 1)`.
#[inline]
pub(crate) fn lower_step(g: f64, l_next: f64) -> f64 {
    (g + (l_next - g).exp().ln_1p()).min(0.0)
}

/// One step of the downward recurrence: `h(i - 1)` from `h(i)` and `l(i)`.
#[inline]
fn upper_step(h: f64, l: f64) -> f64 {
    (h + (l - h).exp().ln_1p()).min(0.0)
}

/// `g(x) = log P(X <= x)` over the whole table.
pub fn log_cdf_lower(table: &LogPmfTable) -> Vec<f64> {
    let logp = table.logp();
    let mut g = Vec::with_capacity(logp.len());
    let mut acc = logp[0];
    g.push(acc);
    for &l in &logp[1..] {
        acc = lower_step(acc, l);
        g.push(acc);
    }
    g
}

/// `h(xstart) = log P(X > xstart)` from the series
/// `l(xstart + 1) + log sum_{i > xstart} exp(l(i) - l(xstart + 1))`.
///
/// The series extends the log-pmf recurrence past the end of the table when
/// needed. Terms are accumulated relative to the largest exponent seen so far,
/// so the sum stays finite when `xstart` lies below the mode.
pub fn log_tail_init(table: &LogPmfTable, xstart: usize) -> Result<f64> {
    if table.params().lambda() == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let half_eps = f64::EPSILON / 2.0;
    let mut values = table.values_from(xstart + 1);
    let first = values.next().expect("recurrence is unbounded");

    let mut shift = 0.0_f64;
    let mut sum = 1.0_f64;
    let mut comp = 0.0_f64;
    let mut negligible = 0;
    for l in values.take(TAIL_MAX_TERMS) {
        let t = l - first;
        if t > shift {
            let scale = (shift - t).exp();
            sum = sum * scale + 1.0;
            comp *= scale;
            shift = t;
            negligible = 0;
            continue;
        }
        let term = (t - shift).exp();
        let s = sum + term;
        comp += (sum - s) + term;
        sum = s;
        if term < half_eps * sum {
            negligible += 1;
            if negligible == TAIL_NEGLIGIBLE_RUN {
                return Ok(first + shift + (sum + comp).ln());
            }
        } else {
            negligible = 0;
        }
    }
    Err(Error::TailNotConverged {
        xstart,
        iterations: TAIL_MAX_TERMS,
    })
}

/// `h(x) = log P(X > x)` for `x = 0..=xstart` by the downward recurrence
/// from `h(xstart) = h_init`.
pub fn log_cdf_upper(table: &LogPmfTable, h_init: f64, xstart: usize) -> Result<Vec<f64>> {
    if xstart > table.xmax() {
        return Err(Error::TableTooShort {
            xmax: table.xmax(),
            index: xstart,
        });
    }
    let mut h = vec![0.0; xstart + 1];
    downward(table.logp(), h_init, xstart, 0, &mut h);
    Ok(h)
}

/// Fills `out[bottom..=top]` (indices past `out.len()` are skipped) by the
/// downward recurrence from `h(top) = h_top`.
fn downward(logp: &[f64], h_top: f64, top: usize, bottom: usize, out: &mut [f64]) {
    if h_top == f64::NEG_INFINITY {
        for slot in out.iter_mut().take(top + 1).skip(bottom) {
            *slot = f64::NEG_INFINITY;
        }
        return;
    }
    let mut h = h_top.min(0.0);
    if top < out.len() {
        out[top] = h;
    }
    for i in (bottom + 1..=top).rev() {
        h = upper_step(h, logp[i]);
        if i - 1 < out.len() {
            out[i - 1] = h;
        }
    }
}

/// First survival anchor: the downward recurrence for `x <= anchor` starts
/// here, and further anchors sit at its integer multiples.
pub fn tail_anchor(params: DistParams) -> Result<usize> {
    let a = (params.mean() + TAIL_ANCHOR_SIGMAS * params.variance().sqrt()).ceil().max(1.0);
    if a > MAX_XMAX as f64 {
        return Err(Error::TableTooLarge {
            requested: a,
            limit: MAX_XMAX,
        });
    }
    Ok(a as usize)
}

/// `h(x)` for `x = 0..=xmax`.
///
/// The index axis is cut into blocks `(k-1)a, ka]` with `a` from
/// [`tail_anchor`]; each block runs the downward recurrence from its own
/// tail-series initialization at `ka`. Every `h(x)` is therefore a function of
/// the parameters and `x` alone, whatever `xmax` is.
pub fn log_survival(table: &LogPmfTable, xmax: usize) -> Result<Vec<f64>> {
    check_xmax(xmax)?;
    let params = table.params();
    if params.lambda() == 0.0 {
        return Ok(vec![f64::NEG_INFINITY; xmax + 1]);
    }
    let anchor = tail_anchor(params)?;
    let blocks = xmax.div_ceil(anchor).max(1);
    let top = blocks * anchor;
    let mut ext;
    let source = if top <= table.xmax() {
        table
    } else {
        ext = table.clone();
        ext.extend_to(top)?;
        &ext
    };

    let mut h = vec![0.0; xmax + 1];
    for k in 1..=blocks {
        let hi = k * anchor;
        let lo = (k - 1) * anchor;
        let h_init = log_tail_init(source, hi)?;
        downward(source.logp(), h_init, hi, if k == 1 { 0 } else { lo + 1 }, &mut h);
    }
    Ok(h)
}

/// Log lower-tail and log upper-tail tables over the span of one log-pmf table.
#[derive(Debug, Clone)]
pub struct TailTables<'a> {
    source: &'a LogPmfTable,
    g: Vec<f64>,
    h: Vec<f64>,
}

impl<'a> TailTables<'a> {
    pub fn new(source: &'a LogPmfTable) -> Result<Self> {
        let g = log_cdf_lower(source);
        let h = log_survival(source, source.xmax())?;
        Ok(Self { source, g, h })
    }

    pub fn source(&self) -> &'a LogPmfTable {
        self.source
    }

    /// `g(x) = log P(X <= x)`.
    pub fn g(&self) -> &[f64] {
        &self.g
    }

    /// `h(x) = log P(X > x)`.
    pub fn h(&self) -> &[f64] {
        &self.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64, prob: f64) -> DistParams {
        DistParams::new(lambda, prob).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(DistParams::new(-1.0, 0.2).is_err());
        assert!(DistParams::new(f64::NAN, 0.2).is_err());
        assert!(DistParams::new(f64::INFINITY, 0.2).is_err());
        assert!(DistParams::new(1.0, 1.0).is_err());
        assert!(DistParams::new(1.0, -0.1).is_err());
        assert!(DistParams::new(1.0, f64::NAN).is_err());
        assert!(DistParams::new(0.0, 0.0).is_ok());
    }

    #[test]
    fn first_two_entries() {
        let t = log_pmf_table(params(8.0, 0.2), 1).unwrap();
        assert_eq!(t.logp()[0], -8.0);
        assert!((t.logp()[1] - (-8.0 + 6.4_f64.ln())).abs() < 1e-14);
        let t0 = log_pmf_table(params(8.0, 0.2), 0).unwrap();
        assert_eq!(t0.logp(), &[-8.0]);
    }

    #[test]
    fn oversized_table_rejected() {
        assert!(matches!(
            log_pmf_table(params(1.0, 0.1), MAX_XMAX + 1),
            Err(Error::TableTooLarge { .. })
        ));
    }

    #[test]
    fn point_mass_at_zero() {
        let t = log_pmf_table(params(0.0, 0.3), 5).unwrap();
        assert_eq!(t.logp()[0], 0.0);
        assert!(t.logp()[1..].iter().all(|&v| v == f64::NEG_INFINITY));
        let tails = TailTables::new(&t).unwrap();
        assert!(tails.g().iter().all(|&v| v == 0.0));
        assert!(tails.h().iter().all(|&v| v == f64::NEG_INFINITY));
    }

    #[test]
    fn extension_matches_longer_table() {
        let p = params(3.5, 0.4);
        let mut short = log_pmf_table(p, 10).unwrap();
        let long = log_pmf_table(p, 60).unwrap();
        let cont: Vec<f64> = short.continuation().take(50).collect();
        assert_eq!(&cont[..], &long.logp()[11..61]);
        short.extend_to(60).unwrap();
        assert_eq!(short.logp(), long.logp());
    }

    #[test]
    fn g_starts_at_minus_lambda_and_rises_to_zero() {
        let t = log_pmf_table(params(8.0, 0.2), 200).unwrap();
        let g = log_cdf_lower(&t);
        assert_eq!(g[0], -8.0);
        assert!(g.windows(2).all(|w| w[0] <= w[1]));
        assert!(g[200] > -1e-15 && g[200] <= 0.0);
    }

    #[test]
    fn tail_at_zero_is_complement_of_mass_at_zero() {
        for &(lambda, prob) in &[(8.0, 0.2), (0.5, 0.9), (20.0, 0.0)] {
            let t = log_pmf_table(params(lambda, prob), 0).unwrap();
            let h0 = log_tail_init(&t, 0).unwrap();
            let want = (-(-lambda).exp()).ln_1p();
            assert!((h0 - want).abs() < 1e-12, "{lambda} {prob}: {h0} vs {want}");
        }
    }

    #[test]
    fn upper_requires_table_coverage() {
        let t = log_pmf_table(params(2.0, 0.5), 5).unwrap();
        assert!(matches!(
            log_cdf_upper(&t, -1.0, 6),
            Err(Error::TableTooShort { .. })
        ));
    }

    #[test]
    fn survival_independent_of_table_length() {
        let p = params(8.0, 0.2);
        let a = tail_anchor(p).unwrap();
        let t = log_pmf_table(p, 3 * a + 7).unwrap();
        let long = log_survival(&t, 3 * a + 7).unwrap();
        for xmax in [0, 5, a - 1, a, a + 1, 2 * a + 3] {
            let short = log_survival(&t, xmax).unwrap();
            assert_eq!(&short[..], &long[..=xmax]);
        }
    }

    #[test]
    fn upper_matches_single_pass_closely() {
        let p = params(2.0, 0.5);
        let t = log_pmf_table(p, 40).unwrap();
        let h_init = log_tail_init(&t, 40).unwrap();
        let single = log_cdf_upper(&t, h_init, 40).unwrap();
        let anchored = log_survival(&t, 40).unwrap();
        for (a, b) in single.iter().zip(&anchored) {
            assert!((a - b).abs() <= 1e-13, "{a} vs {b}");
        }
    }
}
