//! Mass, distribution and quantile functions over batches of points.
//!
//! Each call takes scalar parameters and a slice of points, builds one table
//! out to the largest finite point and answers every element from it. Bad
//! elements (NaN, out of range, off the support) never fail the batch.

use crate::error::{Error, Result};
use crate::kernel::{self, check_xmax, DistParams, LogPmfTable, MAX_XMAX};

/// Mean and variance of a Pólya-Aeppli distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mu: f64,
    pub sigma2: f64,
}

impl Moments {
    /// Requires finite `mu > 0` and `sigma2 >= mu`.
    pub fn new(mu: f64, sigma2: f64) -> Result<Self> {
        let m = Self { mu, sigma2 };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || self.mu <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "mean",
                value: self.mu,
                reason: "must be finite and positive",
            });
        }
        if !self.sigma2.is_finite() || self.sigma2 <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "variance",
                value: self.sigma2,
                reason: "must be finite and positive",
            });
        }
        if self.sigma2 < self.mu {
            return Err(Error::Underdispersed {
                mu: self.mu,
                sigma2: self.sigma2,
            });
        }
        Ok(())
    }
}

/// `lambda = 2 mu^2 / (sigma2 + mu)`, `p = (sigma2 - mu) / (sigma2 + mu)`.
pub fn params_from_moments(m: Moments) -> Result<DistParams> {
    m.validate()?;
    let denom = m.sigma2 + m.mu;
    DistParams::new(2.0 * m.mu * m.mu / denom, (m.sigma2 - m.mu) / denom)
}

/// `mu = lambda / (1 - p)`, `sigma2 = lambda (1 + p) / (1 - p)^2`.
pub fn moments(params: DistParams) -> Moments {
    Moments {
        mu: params.mean(),
        sigma2: params.variance(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarningKind {
    /// A mass point that is not a non-negative integer; the value is zero.
    NonInteger,
    /// A probability outside `[0, 1]` (or a log-probability above zero).
    OutOfDomain,
}

/// Element-level diagnostic attached to a batch result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Warning {
    pub index: usize,
    pub kind: WarningKind,
}

/// Values of one batch call plus any element-level warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub values: Vec<f64>,
    pub warnings: Vec<Warning>,
}

impl Evaluated {
    fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            warnings: Vec::new(),
        }
    }
}

/// A batch of quantiles or probabilities with its output convention.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbQuery {
    pub values: Vec<f64>,
    pub log_scale: bool,
    pub lower_tail: bool,
}

impl ProbQuery {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            log_scale: false,
            lower_tail: true,
        }
    }

    pub fn log_scale(mut self, yes: bool) -> Self {
        self.log_scale = yes;
        self
    }

    pub fn lower_tail(mut self, yes: bool) -> Self {
        self.lower_tail = yes;
        self
    }

    /// Treats `values` as quantiles.
    pub fn cdf(&self, params: DistParams) -> Result<Evaluated> {
        cdf(&self.values, params, self.lower_tail, self.log_scale)
    }

    /// Treats `values` as probabilities.
    pub fn quantile(&self, params: DistParams) -> Result<Evaluated> {
        quantile(&self.values, params, self.lower_tail, self.log_scale)
    }
}

/// `exp` that flushes subnormal results to zero.
#[inline]
pub(crate) fn to_linear(v: f64) -> f64 {
    let e = v.exp();
    if e < f64::MIN_POSITIVE {
        0.0
    } else {
        e
    }
}

#[inline]
fn emit(v: f64, log_scale: bool) -> f64 {
    if log_scale {
        v
    } else {
        to_linear(v)
    }
}

/// Converts a finite non-negative point to a table index, rejecting points
/// beyond the table limit.
fn index_of(v: f64) -> Result<usize> {
    let f = v.floor();
    if f > MAX_XMAX as f64 {
        return Err(Error::TableTooLarge {
            requested: f,
            limit: MAX_XMAX,
        });
    }
    Ok(f as usize)
}

/// `P(X = x)`, or `log P(X = x)` with `log_scale`, for each element of `x`.
///
/// Negative or infinite points give zero; non-integer points give zero and a
/// [`WarningKind::NonInteger`] warning; NaN gives NaN.
pub fn pmf(x: &[f64], params: DistParams, log_scale: bool) -> Result<Evaluated> {
    let support = |v: f64| v.is_finite() && v >= 0.0 && v.fract() == 0.0;
    let top = x.iter().copied().filter(|&v| support(v)).fold(None, |m: Option<f64>, v| {
        Some(m.map_or(v, |m| m.max(v)))
    });
    let table = match top {
        Some(t) => Some(LogPmfTable::new(params, index_of(t)?)?),
        None => None,
    };

    let zero = emit(f64::NEG_INFINITY, log_scale);
    let mut out = Evaluated::new(Vec::with_capacity(x.len()));
    for (i, &v) in x.iter().enumerate() {
        let value = if v.is_nan() {
            f64::NAN
        } else if support(v) {
            let table = table.as_ref().expect("table built for supported points");
            emit(table.logp()[v as usize], log_scale)
        } else {
            if v.is_finite() && v.fract() != 0.0 {
                out.warnings.push(Warning {
                    index: i,
                    kind: WarningKind::NonInteger,
                });
            }
            zero
        };
        out.values.push(value);
    }
    Ok(out)
}

/// `l` and `g` built together, stopping early once `g` stops changing past
/// the mode.
struct LowerTable {
    logp: LogPmfTable,
    g: Vec<f64>,
}

impl LowerTable {
    fn new(params: DistParams) -> Result<Self> {
        let logp = LogPmfTable::new(params, 0)?;
        let g = vec![logp.logp()[0]];
        Ok(Self { logp, g })
    }

    /// Past the mode, once an increment of `g` rounds away, every later
    /// (smaller) increment does too.
    fn saturated(&self) -> bool {
        let n = self.g.len();
        let l = self.logp.logp();
        n >= 2 && self.g[n - 1] == self.g[n - 2] && l[n - 1] <= l[n - 2]
    }

    /// Extends to `xmax` unless saturation comes first.
    fn extend_to(&mut self, xmax: usize) -> Result<()> {
        check_xmax(xmax)?;
        while self.g.len() <= xmax && !self.saturated() {
            let next = self.g.len();
            self.logp.extend_to(next)?;
            let g = kernel::lower_step(self.g[next - 1], self.logp.logp()[next]);
            self.g.push(g);
        }
        Ok(())
    }

    /// `g(x)`; beyond a saturated table every value equals the last one.
    fn g_at(&self, x: usize) -> f64 {
        self.g.get(x).copied().unwrap_or(self.g[self.g.len() - 1])
    }
}

/// `P(X <= q)` (or `P(X > q)` when `!lower_tail`), optionally on log scale.
///
/// Points are floored. The lower tail is read from the forward recurrence;
/// the upper tail from the anchored downward recurrence, so no value in the
/// upper tail is ever formed as `1 - F`.
pub fn cdf(q: &[f64], params: DistParams, lower_tail: bool, log_scale: bool) -> Result<Evaluated> {
    let top = q
        .iter()
        .copied()
        .filter(|v| v.is_finite() && *v >= 0.0)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));

    let below = if lower_tail { f64::NEG_INFINITY } else { 0.0 };
    let above = if lower_tail { 0.0 } else { f64::NEG_INFINITY };

    let lookup: Box<dyn Fn(usize) -> f64> = match top {
        None => Box::new(|_| f64::NAN),
        Some(t) if lower_tail => {
            let mut table = LowerTable::new(params)?;
            // Saturation can stop the table short of any index check.
            let xmax = t.floor().min(MAX_XMAX as f64 + 1.0);
            if xmax > MAX_XMAX as f64 {
                table.extend_to(MAX_XMAX)?;
                if !table.saturated() {
                    return Err(Error::TableTooLarge {
                        requested: t.floor(),
                        limit: MAX_XMAX,
                    });
                }
            } else {
                table.extend_to(xmax as usize)?;
            }
            Box::new(move |x| table.g_at(x))
        }
        Some(t) => {
            let xmax = index_of(t)?;
            let table = LogPmfTable::new(params, xmax)?;
            let h = kernel::log_survival(&table, xmax)?;
            Box::new(move |x| h[x])
        }
    };

    let values = q
        .iter()
        .map(|&v| {
            if v.is_nan() {
                f64::NAN
            } else if v < 0.0 {
                emit(below, log_scale)
            } else if v == f64::INFINITY {
                emit(above, log_scale)
            } else {
                emit(lookup(v.floor() as usize), log_scale)
            }
        })
        .collect();
    Ok(Evaluated::new(values))
}

/// Standard normal quantile `z` with `P(Z > z) = exp(ln_upper)`.
///
/// Acklam-style rational approximation, good to about 1e-4 in `z`, taking
/// the log of the tail probability so arbitrarily deep tails stay finite.
/// It only seeds the quantile search, which verifies its own bound.
pub(crate) fn normal_upper_quantile(ln_upper: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549671348874820e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    // Tail rational function in q = sqrt(-2 ln t), t the smaller tail.
    let tail = |ln_t: f64| {
        let q = (-2.0 * ln_t).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    let s = ln_upper.exp();
    if s < P_LOW {
        // Lower-tail formula evaluated at the upper tail gives -z.
        -tail(ln_upper)
    } else if s > 1.0 - P_LOW {
        tail((-s).ln_1p())
    } else {
        let p = 1.0 - s;
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Moment-matched gamma quantile (Wilson-Hilferty) at upper-tail log
/// probability `ln_upper`, plus one standard deviation.
pub(crate) fn gamma_search_bound(params: DistParams, ln_upper: f64) -> f64 {
    let mu = params.mean();
    let sigma2 = params.variance();
    let shape = mu * mu / sigma2;
    let scale = sigma2 / mu;
    let z = normal_upper_quantile(ln_upper);
    let c = 1.0 / (9.0 * shape);
    let base = (1.0 - c + z * c.sqrt()).max(0.0);
    shape * scale * base.powi(3) + sigma2.sqrt()
}

/// Canonical form of one quantile request.
#[derive(Debug, Clone, Copy)]
enum Target {
    Done(f64),
    /// Smallest `x` with `P(X <= x) >= u`, `u` given linearly.
    LowerLinear(f64),
    /// Same, with `ln u`.
    LowerLog(f64),
    /// Smallest `x` with `P(X > x) <= s`, `s` given linearly.
    UpperLinear(f64),
    /// Same, with `ln s`.
    UpperLog(f64),
}

impl Target {
    /// Log of the upper-tail probability the answer must reach.
    fn ln_upper(self) -> Option<f64> {
        match self {
            Target::Done(_) => None,
            Target::LowerLinear(u) => Some((-u).ln_1p()),
            Target::LowerLog(lu) => Some((-lu.exp_m1()).ln()),
            Target::UpperLinear(s) => Some(s.ln()),
            Target::UpperLog(ls) => Some(ls),
        }
    }
}

fn classify(v: f64, lower_tail: bool, log_scale: bool, degenerate: bool) -> (Target, bool) {
    if v.is_nan() {
        return (Target::Done(f64::NAN), false);
    }
    let valid = if log_scale { v <= 0.0 } else { (0.0..=1.0).contains(&v) };
    if !valid {
        return (Target::Done(f64::NAN), true);
    }
    if degenerate {
        return (Target::Done(0.0), false);
    }
    // (probability of the lower tail is zero, is one)
    let (zero, one) = match (lower_tail, log_scale) {
        (true, false) => (v == 0.0, v == 1.0),
        (true, true) => (v == f64::NEG_INFINITY, v == 0.0),
        (false, false) => (v == 1.0, v == 0.0),
        (false, true) => (v == 0.0, v == f64::NEG_INFINITY),
    };
    let t = if zero {
        Target::Done(0.0)
    } else if one {
        Target::Done(f64::INFINITY)
    } else {
        match (lower_tail, log_scale) {
            (true, false) => Target::LowerLinear(v),
            (true, true) => Target::LowerLog(v),
            (false, false) => Target::UpperLinear(v),
            (false, true) => Target::UpperLog(v),
        }
    };
    (t, false)
}

/// Tables backing one quantile batch, grown by doubling.
struct QuantileTables {
    params: DistParams,
    lower: LowerTable,
    h: Option<Vec<f64>>,
    xmax: usize,
}

impl QuantileTables {
    fn new(params: DistParams, xmax: usize) -> Result<Self> {
        let mut t = Self {
            params,
            lower: LowerTable::new(params)?,
            h: None,
            xmax: 0,
        };
        t.grow(xmax)?;
        Ok(t)
    }

    fn grow(&mut self, xmax: usize) -> Result<()> {
        check_xmax(xmax)?;
        self.xmax = xmax;
        self.lower.extend_to(xmax)?;
        self.h = None;
        Ok(())
    }

    fn h(&mut self) -> Result<&[f64]> {
        if self.h.is_none() {
            let table = LogPmfTable::new(self.params, self.xmax)?;
            self.h = Some(kernel::log_survival(&table, self.xmax)?);
        }
        Ok(self.h.as_deref().expect("just built"))
    }

    fn g_at(&self, x: usize) -> f64 {
        self.lower.g_at(x)
    }

    /// First `x <= xmax` with `pred(g(x))`, for a predicate monotone in `x`.
    fn first_g(&self, pred: impl Fn(f64) -> bool) -> Option<usize> {
        let n = self.xmax + 1;
        let idx = partition_point(n, |x| !pred(self.g_at(x)));
        (idx < n).then_some(idx)
    }

    /// Answer for one target, or `None` if the tables are too short.
    fn resolve(&mut self, t: Target) -> Result<Option<f64>> {
        let n = self.xmax + 1;
        let found = match t {
            Target::Done(v) => return Ok(Some(v)),
            Target::LowerLinear(u) => self.first_g(|g| to_linear(g) >= u),
            Target::LowerLog(lu) => match self.first_g(|g| g >= lu) {
                Some(x) => Some(x),
                None if self.lower.saturated() => {
                    // g stalls below lu in floating point; resolve against
                    // the survival table instead.
                    let ls = (-lu.exp_m1()).ln();
                    let h = self.h()?;
                    let idx = partition_point(n, |x| h[x] > ls);
                    (idx < n).then_some(idx)
                }
                None => None,
            },
            Target::UpperLinear(s) => {
                let h = self.h()?;
                let idx = partition_point(n, |x| to_linear(h[x]) > s);
                (idx < n).then_some(idx)
            }
            Target::UpperLog(ls) => {
                let h = self.h()?;
                let idx = partition_point(n, |x| h[x] > ls);
                (idx < n).then_some(idx)
            }
        };
        Ok(found.map(|x| x as f64))
    }
}

/// First index in `0..n` where `still_below` turns false; `n` if it never does.
fn partition_point(n: usize, still_below: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if still_below(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Generalized inverse `min { x : P(X <= x) >= u }` for each probability.
///
/// With `!lower_tail` the inputs are upper-tail probabilities `s` and the
/// answer is `min { x : P(X > x) <= s }`, read from the survival table so
/// that deep upper-tail requests keep their precision. Results are integral
/// `f64`s; `+inf` when the probability is one, NaN (with a warning) for
/// inputs outside the probability range.
///
/// The search table starts at a moment-matched gamma bound for the most
/// extreme request and doubles until it covers every request.
pub fn quantile(pr: &[f64], params: DistParams, lower_tail: bool, log_scale: bool) -> Result<Evaluated> {
    let degenerate = params.lambda() == 0.0;
    let mut warnings = Vec::new();
    let targets: Vec<Target> = pr
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (t, bad) = classify(v, lower_tail, log_scale, degenerate);
            if bad {
                warnings.push(Warning {
                    index: i,
                    kind: WarningKind::OutOfDomain,
                });
            }
            t
        })
        .collect();

    let extreme = targets
        .iter()
        .filter_map(|t| t.ln_upper())
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));

    let mut values = vec![f64::NAN; targets.len()];
    let Some(ln_upper) = extreme else {
        for (slot, t) in values.iter_mut().zip(&targets) {
            if let Target::Done(v) = t {
                *slot = *v;
            }
        }
        return Ok(Evaluated { values, warnings });
    };

    let bound = gamma_search_bound(params, ln_upper).ceil().max(1.0);
    let mut xmax = if bound > MAX_XMAX as f64 { MAX_XMAX } else { bound as usize };
    let mut tables = QuantileTables::new(params, xmax)?;
    let mut pending: Vec<usize> = (0..targets.len()).collect();
    loop {
        let mut unresolved = Vec::new();
        for &i in &pending {
            match tables.resolve(targets[i])? {
                Some(v) => values[i] = v,
                None => unresolved.push(i),
            }
        }
        if unresolved.is_empty() {
            break;
        }
        if xmax == MAX_XMAX {
            return Err(Error::TableTooLarge {
                requested: 2.0 * MAX_XMAX as f64,
                limit: MAX_XMAX,
            });
        }
        xmax = xmax.saturating_mul(2).min(MAX_XMAX);
        tables.grow(xmax)?;
        pending = unresolved;
    }
    Ok(Evaluated { values, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64, prob: f64) -> DistParams {
        DistParams::new(lambda, prob).unwrap()
    }

    #[test]
    fn moments_of_figure_settings() {
        let p = params_from_moments(Moments::new(10.0, 15.0).unwrap()).unwrap();
        assert!((p.lambda() - 8.0).abs() < 1e-14 && (p.prob() - 0.2).abs() < 1e-15);
        let p = params_from_moments(Moments::new(10.0, 10.0).unwrap()).unwrap();
        assert_eq!((p.lambda(), p.prob()), (10.0, 0.0));
        let p = params_from_moments(Moments::new(4000.0, 4050.0).unwrap()).unwrap();
        assert!((p.lambda() - 2.0 * 4000.0 * 4000.0 / 8050.0).abs() < 1e-10);
        assert!((p.prob() - 50.0 / 8050.0).abs() < 1e-17);

        let m = moments(params(8.0, 0.2));
        assert!((m.mu - 10.0).abs() < 1e-14 && (m.sigma2 - 15.0).abs() < 1e-13);
        assert_eq!(moments(params(10.0, 0.0)), Moments { mu: 10.0, sigma2: 10.0 });
        let m = moments(params(1.0, 0.5));
        assert!((m.mu - 2.0).abs() < 1e-15 && (m.sigma2 - 6.0).abs() < 1e-14);
    }

    #[test]
    fn underdispersion_rejected() {
        assert!(matches!(Moments::new(10.0, 9.0), Err(Error::Underdispersed { .. })));
        let raw = Moments { mu: 10.0, sigma2: 9.0 };
        assert!(params_from_moments(raw).is_err());
        assert!(Moments::new(0.0, 1.0).is_err());
    }

    #[test]
    fn pmf_edge_elements() {
        let p = params(8.0, 0.2);
        let out = pmf(&[0.0, 1.0, 2.5, -1.0, f64::NAN, f64::INFINITY], p, false).unwrap();
        assert_eq!(out.values[0], (-8.0_f64).exp());
        assert!(((out.values[1] - 6.4 * (-8.0_f64).exp()) / out.values[1]).abs() < 1e-14);
        assert_eq!(out.values[2], 0.0);
        assert_eq!(out.values[3], 0.0);
        assert!(out.values[4].is_nan());
        assert_eq!(out.values[5], 0.0);
        assert_eq!(
            out.warnings,
            vec![Warning {
                index: 2,
                kind: WarningKind::NonInteger
            }]
        );
        let log = pmf(&[0.0, -3.0], p, true).unwrap();
        assert_eq!(log.values, vec![-8.0, f64::NEG_INFINITY]);
    }

    #[test]
    fn pmf_x2_closed_form() {
        let v = pmf(&[2.0], params(2.0, 0.5), false).unwrap().values[0];
        assert!(((v - (-2.0_f64).exp()) / v).abs() < 1e-14);
    }

    #[test]
    fn cdf_support_bounds() {
        let p = params(8.0, 0.2);
        let q = [-1.0, 0.0, f64::INFINITY, f64::NEG_INFINITY, f64::NAN, 0.7];
        let lo = cdf(&q, p, true, false).unwrap().values;
        assert_eq!(lo[0], 0.0);
        assert_eq!(lo[1], (-8.0_f64).exp());
        assert_eq!(lo[2], 1.0);
        assert_eq!(lo[3], 0.0);
        assert!(lo[4].is_nan());
        assert_eq!(lo[5], lo[1]);
        let up = cdf(&q, p, false, false).unwrap().values;
        assert_eq!(up[0], 1.0);
        assert_eq!(up[2], 0.0);
        assert!(up[4].is_nan());
        let up_log = cdf(&[-1.0, f64::INFINITY], p, false, true).unwrap().values;
        assert_eq!(up_log, vec![0.0, f64::NEG_INFINITY]);
    }

    #[test]
    fn cdf_far_lower_tail_query_saturates() {
        let p = params(2.0, 0.5);
        let v = cdf(&[1e15, 3.0], p, true, true).unwrap().values;
        assert!(v[0] <= 0.0 && v[0] > -1e-15);
        assert!(v[1] < 0.0);
        assert!(matches!(cdf(&[1e15], p, false, true), Err(Error::TableTooLarge { .. })));
    }

    #[test]
    fn quantile_boundaries() {
        let p = params(2.0, 0.5);
        let v = quantile(&[0.0, 1.0, f64::NAN, 1.5, -0.1], p, true, false).unwrap();
        assert_eq!(v.values[0], 0.0);
        assert_eq!(v.values[1], f64::INFINITY);
        assert!(v.values[2..].iter().all(|x| x.is_nan()));
        assert_eq!(v.warnings.len(), 2);
        let up = quantile(&[1.0, 0.0], p, false, false).unwrap().values;
        assert_eq!(up, vec![0.0, f64::INFINITY]);
        let lg = quantile(&[f64::NEG_INFINITY, 0.0, 0.5], p, true, true).unwrap();
        assert_eq!(&lg.values[..2], &[0.0, f64::INFINITY]);
        assert!(lg.values[2].is_nan());
    }

    #[test]
    fn quantile_point_mass() {
        let p = params(0.0, 0.4);
        let v = quantile(&[0.0, 0.3, 1.0], p, true, false).unwrap().values;
        assert_eq!(v, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn deep_upper_tail_quantile() {
        let p = params(8.0, 0.2);
        let h = cdf(&[300.0], p, false, true).unwrap().values[0];
        assert!(h < -100.0);
        let q = quantile(&[h], p, false, true).unwrap().values[0];
        assert_eq!(q, 300.0);
    }

    #[test]
    fn log_lower_quantile_is_consistent_with_log_cdf() {
        let p = params(2.0, 0.5);
        for lu in [-1e-3, -1e-9, -1e-15, -1e-30] {
            let q = quantile(&[lu], p, true, true).unwrap().values[0];
            let at = cdf(&[q, q - 1.0], p, true, true).unwrap().values;
            assert!(at[0] >= lu && at[1] < lu, "{lu}: {q}");
        }
    }

    #[test]
    fn normal_quantile_known_values() {
        // reference values from a double-precision inverse normal
        for (s, z) in [(0.5, 0.0), (0.025, 1.959963984540054), (0.975, -1.959963984540054), (0.01, 2.3263478740408408), (1e-10, 6.361340902404056)] {
            assert!((normal_upper_quantile(f64::ln(s)) - z).abs() < 1e-4, "{s}");
        }
        assert!(normal_upper_quantile(-1e4).is_finite());
    }
}
