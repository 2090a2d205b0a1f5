use crate::counts::{CountHistogram, MultiplicityProfile};
use crate::error::{Error, Result};
use crate::special::{digamma, ln_gamma_ratio, trigamma, EULER_GAMMA};

use super::alphabet_size;

/// Concentration used by BAY when none is given. Small enough that BAY
/// coincides with the plug-in estimate to display precision.
pub const DEFAULT_BAY_ALPHA: f64 = 1e-6;

/// Entropy of the posterior-mean distribution under a symmetric Dirichlet(α)
/// prior on `k` cells.
pub fn dirichlet_plugin(h: &CountHistogram, alpha: f64, k: Option<u64>) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    let k = alphabet_size(h, k)?;
    let denom = h.total() as f64 + k as f64 * alpha;
    let mut out = 0.0;
    for (j, f) in h.multiplicities().iter() {
        let p = (j as f64 + alpha) / denom;
        out -= f as f64 * p * p.ln();
    }
    let unseen = (k - h.support() as u64) as f64;
    if unseen > 0.0 {
        let p = alpha / denom;
        out -= unseen * p * p.ln();
    }
    Ok(out)
}

pub fn laplace(h: &CountHistogram, k: Option<u64>) -> Result<f64> {
    dirichlet_plugin(h, 1.0, k)
}

pub fn jeffreys(h: &CountHistogram, k: Option<u64>) -> Result<f64> {
    dirichlet_plugin(h, 0.5, k)
}

/// α = 1/K.
pub fn schurmann_grassberger(h: &CountHistogram, k: Option<u64>) -> Result<f64> {
    let kk = alphabet_size(h, k)?;
    dirichlet_plugin(h, 1.0 / kk as f64, Some(kk))
}

/// α = √N / K.
pub fn minimax(h: &CountHistogram, k: Option<u64>) -> Result<f64> {
    let kk = alphabet_size(h, k)?;
    dirichlet_plugin(h, (h.total() as f64).sqrt() / kk as f64, Some(kk))
}

/// Asymptotic NSB: γ − ln 2 + 2 ln N − ψ(N − m). NaN without coincidences.
pub fn ansb(h: &CountHistogram) -> f64 {
    let n = h.total();
    let delta = n - h.support() as u64;
    if delta == 0 {
        return f64::NAN;
    }
    EULER_GAMMA - std::f64::consts::LN_2 + 2.0 * (n as f64).ln() - digamma(delta as f64)
}

const NSB_LOG_BETA_RANGE: (f64, f64) = (-15.0, 15.0);
const NSB_GRID: usize = 200;

/// Nemenman–Shafee–Bialek estimator on `k` cells (default: observed support).
///
/// Averages the Dirichlet(β) posterior mean entropy over the prior on β that
/// makes the prior entropy approximately uniform. The integral runs over
/// ln β on a fixed window, split at the posterior mode and at multiples of the
/// posterior width.
pub fn nsb(h: &CountHistogram, k: Option<u64>) -> Result<f64> {
    let k = alphabet_size(h, k)?;
    if k == 1 {
        return Ok(0.0);
    }
    let model = NsbModel::new(h, k);
    let (lo, hi) = NSB_LOG_BETA_RANGE;
    let step = (hi - lo) / (NSB_GRID - 1) as f64;
    let grid: Vec<f64> = (0..NSB_GRID).map(|i| lo + step * i as f64).collect();
    let logw: Vec<f64> = grid.iter().map(|&x| model.log_weight(x)).collect();

    let best = (0..NSB_GRID)
        .filter(|&i| logw[i].is_finite())
        .max_by(|&a, &b| logw[a].total_cmp(&logw[b]))
        .ok_or_else(|| Error::Numerical("NSB posterior weight is nowhere finite".into()))?;
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(NSB_GRID - 1)];
    let mode = golden_max(|x| model.log_weight(x), a, b, 80);
    let peak = model.log_weight(mode).max(logw[best]);
    let sigma = curvature_width(|x| model.log_weight(x), mode, 1e-3).unwrap_or(1.0);

    let mut breaks = grid.clone();
    breaks.push(mode);
    for s in [0.5, 1.0, 2.0, 4.0, 8.0] {
        breaks.push(mode - s * sigma);
        breaks.push(mode + s * sigma);
    }
    breaks.retain(|x| (lo..=hi).contains(x));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|x, y| (*x - *y).abs() < 1e-12);

    let integrand = |x: f64| -> [f64; 2] {
        let lw = model.log_weight(x);
        if !lw.is_finite() || lw - peak < -745.0 {
            return [0.0, 0.0];
        }
        let w = (lw - peak).exp();
        [w, w * model.mean_entropy(x)]
    };

    let mut total = [0.0f64; 2];
    for pair in breaks.windows(2) {
        let (x0, x1) = (pair[0], pair[1]);
        let far_from_mode = (x0 - mode).abs() > 8.0 * sigma && (x1 - mode).abs() > 8.0 * sigma;
        let negligible = model.log_weight(x0) < peak - 60.0 && model.log_weight(x1) < peak - 60.0;
        if far_from_mode && negligible && !(x0..=x1).contains(&mode) {
            continue;
        }
        let part = adaptive_simpson(&integrand, x0, x1, 1e-10 * (x1 - x0) / (hi - lo), 40);
        total[0] += part[0];
        total[1] += part[1];
    }
    if !(total[0] > 0.0) || !total[1].is_finite() {
        return Err(Error::Numerical("NSB normalizer vanished".into()));
    }
    Ok(total[1] / total[0])
}

struct NsbModel {
    profile: Vec<(f64, f64)>,
    n: f64,
    k: f64,
    unseen: f64,
}

impl NsbModel {
    fn new(h: &CountHistogram, k: u64) -> Self {
        let profile = h.multiplicities().iter().map(|(j, f)| (j as f64, f as f64)).collect();
        Self {
            profile,
            n: h.total() as f64,
            k: k as f64,
            unseen: (k - h.support() as u64) as f64,
        }
    }

    /// Log evidence plus log prior weight, as a density in ln β.
    fn log_weight(&self, log_beta: f64) -> f64 {
        let b = log_beta.exp();
        let mut ev = -ln_gamma_ratio(self.k * b, self.n);
        for &(j, f) in &self.profile {
            ev += f * ln_gamma_ratio(b, j);
        }
        ev + (b * self.prior_slope(b)).ln()
    }

    /// d/dβ of the prior mean entropy: K ψ₁(Kβ + 1) − ψ₁(β + 1).
    fn prior_slope(&self, b: f64) -> f64 {
        if b > 1e4 {
            let inv = 1.0 / b;
            return 0.5 * inv * inv * (1.0 - 1.0 / self.k)
                - inv * inv * inv / 6.0 * (1.0 - 1.0 / (self.k * self.k));
        }
        self.k * trigamma(self.k * b + 1.0) - trigamma(b + 1.0)
    }

    fn mean_entropy(&self, log_beta: f64) -> f64 {
        let b = log_beta.exp();
        let z = self.n + self.k * b;
        let mut out = digamma(z + 1.0);
        for &(j, f) in &self.profile {
            out -= f * (j + b) / z * digamma(j + b + 1.0);
        }
        if self.unseen > 0.0 {
            out -= self.unseen * b / z * digamma(b + 1.0);
        }
        out
    }
}

const PYM_LOGIT_D: (f64, f64) = (-12.0, 12.0);
const PYM_LOG_ALPHA: (f64, f64) = (-10.0, 15.0);
const PYM_COARSE: usize = 50;

/// Pitman–Yor mixture estimator.
///
/// Integrates the Pitman–Yor posterior mean entropy over the discount d and
/// concentration α, with a prior proportional to ψ₁(α + 1) and uniform in d.
/// Works on (logit d, ln α). When every observation is a singleton the
/// posterior does not normalize and the estimate is +∞.
pub fn pym(h: &CountHistogram) -> Result<f64> {
    let n = h.total();
    let m = h.support() as u64;
    if m == n {
        return Ok(f64::INFINITY);
    }
    let model = PymModel::new(&h.multiplicities(), n, m);
    let (u0, u1) = PYM_LOGIT_D;
    let (v0, v1) = PYM_LOG_ALPHA;
    let du = (u1 - u0) / (PYM_COARSE - 1) as f64;
    let dv = (v1 - v0) / (PYM_COARSE - 1) as f64;

    let cu: Vec<PymU> = (0..PYM_COARSE).map(|i| model.axis_u(u0 + du * i as f64)).collect();
    let cv: Vec<PymV> = (0..PYM_COARSE).map(|j| model.axis_v(v0 + dv * j as f64)).collect();
    let mut coarse = vec![f64::NEG_INFINITY; PYM_COARSE * PYM_COARSE];
    let mut best = None::<(usize, f64)>;
    for (i, pu) in cu.iter().enumerate() {
        for (j, pv) in cv.iter().enumerate() {
            let l = model.log_post_at(pu, pv);
            coarse[i * PYM_COARSE + j] = l;
            if l.is_finite() && best.is_none_or(|(_, b)| l > b) {
                best = Some((i * PYM_COARSE + j, l));
            }
        }
    }
    let (best_idx, _) =
        best.ok_or_else(|| Error::Numerical("PYM posterior is nowhere finite".into()))?;
    let start = [u0 + du * (best_idx / PYM_COARSE) as f64, v0 + dv * (best_idx % PYM_COARSE) as f64];

    let clamp = |p: [f64; 2]| [p[0].clamp(u0, u1), p[1].clamp(v0, v1)];
    let neg = |p: [f64; 2]| {
        let l = model.log_post(p[0], p[1]);
        if l.is_finite() {
            -l
        } else {
            f64::INFINITY
        }
    };
    let (mode, neg_peak) = nelder_mead(|p| neg(clamp(p)), start, [du, dv], 500);
    let mode = clamp(mode);
    let peak = -neg_peak;

    // Window: every coarse node within 40 log units of the peak, padded by one
    // coarse cell, joined with six posterior widths around the mode.
    let mut win = [mode[0], mode[0], mode[1], mode[1]];
    for i in 0..PYM_COARSE {
        for j in 0..PYM_COARSE {
            if coarse[i * PYM_COARSE + j] >= peak - 40.0 {
                let (u, v) = (u0 + du * i as f64, v0 + dv * j as f64);
                win[0] = win[0].min(u - du);
                win[1] = win[1].max(u + du);
                win[2] = win[2].min(v - dv);
                win[3] = win[3].max(v + dv);
            }
        }
    }
    let su = curvature_width(|u| model.log_post(u, mode[1]), mode[0], 1e-3);
    let sv = curvature_width(|v| model.log_post(mode[0], v), mode[1], 1e-3);
    if let Some(s) = su {
        win[0] = win[0].min(mode[0] - 6.0 * s);
        win[1] = win[1].max(mode[0] + 6.0 * s);
    }
    if let Some(s) = sv {
        win[2] = win[2].min(mode[1] - 6.0 * s);
        win[3] = win[3].max(mode[1] + 6.0 * s);
    }
    let win = [win[0].max(u0), win[1].min(u1), win[2].max(v0), win[3].min(v1)];

    let nodes = |lo: f64, hi: f64, s: Option<f64>| -> usize {
        let per_sigma = s.map_or(0.0, |s| 4.0 * (hi - lo) / s);
        (per_sigma.ceil() as usize).clamp(48, 160)
    };
    let nu = nodes(win[0], win[1], su);
    let nv = nodes(win[2], win[3], sv);
    let hu = (win[1] - win[0]) / (nu - 1) as f64;
    let hv = (win[3] - win[2]) / (nv - 1) as f64;

    let fu: Vec<PymU> = (0..nu).map(|i| model.axis_u(win[0] + hu * i as f64)).collect();
    let fv: Vec<PymV> = (0..nv).map(|j| model.axis_v(win[2] + hv * j as f64)).collect();
    let mut weight = 0.0;
    let mut moment = 0.0;
    for (i, pu) in fu.iter().enumerate() {
        let wu = if i == 0 || i == nu - 1 { 0.5 } else { 1.0 };
        for (j, pv) in fv.iter().enumerate() {
            let l = model.log_post_at(pu, pv);
            if !l.is_finite() || l - peak < -745.0 {
                continue;
            }
            let wv = if j == 0 || j == nv - 1 { 0.5 } else { 1.0 };
            let w = wu * wv * (l - peak).exp();
            weight += w;
            moment += w * model.mean_entropy_at(pu, pv);
        }
    }
    if !(weight > 0.0) {
        return Err(Error::Numerical("PYM normalizer vanished".into()));
    }
    Ok(moment / weight)
}

struct PymModel {
    profile: Vec<(f64, f64)>,
    n: f64,
    m: f64,
}

impl PymModel {
    fn new(p: &MultiplicityProfile, n: u64, m: u64) -> Self {
        Self {
            profile: p.iter().map(|(j, f)| (j as f64, f as f64)).collect(),
            n: n as f64,
            m: m as f64,
        }
    }

    fn axis_u(&self, u: f64) -> PymU {
        let ln_d = -(-u).exp().ln_1p();
        let ln_1md = -u.exp().ln_1p();
        let d = ln_d.exp();
        let one_minus_d = ln_1md.exp();
        let mut log_part = self.m * ln_d + ln_1md;
        let mut ent_part = 0.0;
        for &(j, f) in &self.profile {
            log_part += f * ln_gamma_ratio(one_minus_d, j - 1.0);
            ent_part += f * (j - d) * digamma(j - d + 1.0);
        }
        PymU { d, log_part, ent_part, psi_1md: digamma(one_minus_d) }
    }

    fn axis_v(&self, v: f64) -> PymV {
        let a = v.exp();
        let log_part = trigamma(a + 1.0).ln() + v - ln_gamma_ratio(1.0 + a, self.n - 1.0);
        PymV { a, log_part, psi_z: digamma(a + self.n + 1.0) }
    }

    /// Log posterior density in (logit d, ln α), up to a constant.
    fn log_post_at(&self, pu: &PymU, pv: &PymV) -> f64 {
        // Π_{l=1}^{m-1} (α + l d) = d^{m-1} Γ(α/d + m) / Γ(α/d + 1)
        pu.log_part + pv.log_part + ln_gamma_ratio(pv.a / pu.d + 1.0, self.m - 1.0)
    }

    fn log_post(&self, u: f64, v: f64) -> f64 {
        self.log_post_at(&self.axis_u(u), &self.axis_v(v))
    }

    /// Posterior mean entropy given (d, α).
    fn mean_entropy_at(&self, pu: &PymU, pv: &PymV) -> f64 {
        let z = pv.a + self.n;
        pv.psi_z - (pv.a + self.m * pu.d) / z * pu.psi_1md - pu.ent_part / z
    }
}

struct PymU {
    d: f64,
    log_part: f64,
    ent_part: f64,
    psi_1md: f64,
}

struct PymV {
    a: f64,
    log_part: f64,
    psi_z: f64,
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// 1/√(−f'') at `x` from a central difference, if the curvature is negative.
fn curvature_width(f: impl Fn(f64) -> f64, x: f64, h: f64) -> Option<f64> {
    let c = -(f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    (c > 0.0 && c.is_finite()).then(|| 1.0 / c.sqrt())
}

fn simpson(fa: [f64; 2], fm: [f64; 2], fb: [f64; 2], h: f64) -> [f64; 2] {
    [h / 6.0 * (fa[0] + 4.0 * fm[0] + fb[0]), h / 6.0 * (fa[1] + 4.0 * fm[1] + fb[1])]
}

fn adaptive_simpson(f: &impl Fn(f64) -> [f64; 2], a: f64, b: f64, tol: f64, depth: u32) -> [f64; 2] {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, b - a);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> [f64; 2],
    a: f64,
    b: f64,
    fa: [f64; 2],
    fm: [f64; 2],
    fb: [f64; 2],
    whole: [f64; 2],
    tol: f64,
    depth: u32,
) -> [f64; 2] {
    let m = 0.5 * (a + b);
    let flm = f(0.5 * (a + m));
    let frm = f(0.5 * (m + b));
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = [left[0] + right[0] - whole[0], left[1] + right[1] - whole[1]];
    let scale = 1.0f64.max(whole[1].abs() / whole[0].abs().max(1e-300));
    if depth == 0 || (err[0].abs() <= 15.0 * tol && err[1].abs() <= 15.0 * tol * scale) {
        return [
            left[0] + right[0] + err[0] / 15.0,
            left[1] + right[1] + err[1] / 15.0,
        ];
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    [l[0] + r[0], l[1] + r[1]]
}

/// Minimizes `f` from `start`; returns the best point and value.
fn nelder_mead(
    f: impl Fn([f64; 2]) -> f64,
    start: [f64; 2],
    step: [f64; 2],
    max_iter: usize,
) -> ([f64; 2], f64) {
    let mut simplex = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut vals = simplex.map(&f);
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..max_iter {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        simplex = order.map(|i| simplex[i]);
        vals = order.map(|i| vals[i]);
        if (vals[2] - vals[0]).abs() <= 1e-11 * (1.0 + vals[0].abs()) {
            break;
        }
        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(centroid, simplex[2], -1.0);
        let fr = f(reflected);
        if fr < vals[0] {
            let expanded = lerp(centroid, simplex[2], -2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                vals[2] = fe;
            } else {
                simplex[2] = reflected;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            simplex[2] = reflected;
            vals[2] = fr;
        } else {
            let contracted = if fr < vals[2] {
                lerp(centroid, reflected, 0.5)
            } else {
                lerp(centroid, simplex[2], 0.5)
            };
            let fc = f(contracted);
            if fc < vals[2].min(fr) {
                simplex[2] = contracted;
                vals[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = lerp(simplex[0], simplex[i], 0.5);
                    vals[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    (simplex[best], vals[best])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::maximum_likelihood;

    fn hist(c: &[u64]) -> CountHistogram {
        CountHistogram::from_counts(c.iter().copied()).unwrap()
    }

    #[test]
    fn dirichlet_presets() {
        let h = hist(&[1, 1, 1, 1]);
        assert!((laplace(&h, Some(4)).unwrap() - 4f64.ln()).abs() < 1e-15);
        // {2,1,1}, K = 3, α = 1: p = {3/7, 2/7, 2/7}
        let got = laplace(&hist(&[2, 1, 1]), Some(3)).unwrap();
        assert!((got - 1.078_992_207_877_583_3).abs() < 1e-12, "{got}");
        assert!(laplace(&hist(&[2, 1, 1]), Some(2)).is_err());
    }

    #[test]
    fn dirichlet_unseen_cells_raise_entropy() {
        let h = hist(&[5, 3]);
        let small = jeffreys(&h, Some(2)).unwrap();
        let large = jeffreys(&h, Some(20)).unwrap();
        assert!(large > small);
        assert!(large <= 20f64.ln());
    }

    #[test]
    fn tiny_alpha_matches_plugin() {
        let h = hist(&[9, 4, 2, 1, 1]);
        let bay = dirichlet_plugin(&h, DEFAULT_BAY_ALPHA, None).unwrap();
        assert!((bay - maximum_likelihood(&h)).abs() < 1e-4);
    }

    #[test]
    fn sg_and_minimax_alphas() {
        let h = hist(&[3, 1]);
        let sg = schurmann_grassberger(&h, Some(4)).unwrap();
        assert_eq!(sg, dirichlet_plugin(&h, 0.25, Some(4)).unwrap());
        let mn = minimax(&h, Some(4)).unwrap();
        assert_eq!(mn, dirichlet_plugin(&h, 0.5, Some(4)).unwrap());
    }

    #[test]
    fn ansb_examples() {
        assert!(ansb(&hist(&[1, 1, 1, 1])).is_nan());
        let want = EULER_GAMMA - std::f64::consts::LN_2 + 2.0 * 4f64.ln() - digamma(1.0);
        assert!((ansb(&hist(&[2, 1, 1])) - want).abs() < 1e-14);
    }

    #[test]
    fn nsb_single_cell_is_zero() {
        assert_eq!(nsb(&hist(&[4]), Some(1)).unwrap(), 0.0);
        assert_eq!(nsb(&hist(&[4]), None).unwrap(), 0.0);
    }

    #[test]
    fn nsb_is_close_to_truth_on_large_uniform_sample() {
        let h = hist(&[1000; 8]);
        let v = nsb(&h, Some(8)).unwrap();
        assert!((v - 8f64.ln()).abs() < 0.01, "{v}");
    }

    #[test]
    fn nsb_stays_within_the_alphabet() {
        let h = hist(&[3, 2, 1, 1]);
        let v = nsb(&h, Some(10)).unwrap();
        assert!(v > 0.0 && v < 10f64.ln(), "{v}");
    }

    #[test]
    fn pym_all_singletons_is_infinite() {
        assert_eq!(pym(&hist(&[1, 1, 1, 1])).unwrap(), f64::INFINITY);
    }

    #[test]
    fn pym_is_finite_with_coincidences() {
        let v = pym(&hist(&[2, 1, 1])).unwrap();
        assert!(v.is_finite() && v > 0.0, "{v}");
        let v = pym(&hist(&[50, 30, 10, 5, 3, 1, 1])).unwrap();
        assert!(v.is_finite() && v > 1.0 && v < 3.0, "{v}");
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let (p, v) = nelder_mead(|p| (p[0] - 1.5).powi(2) + 3.0 * (p[1] + 0.5).powi(2), [0.0, 0.0], [1.0, 1.0], 500);
        assert!((p[0] - 1.5).abs() < 1e-4 && (p[1] + 0.5).abs() < 1e-4 && v < 1e-8);
    }

    #[test]
    fn adaptive_simpson_gaussian() {
        let f = |x: f64| [(-0.5 * x * x).exp(), x * x * (-0.5 * x * x).exp()];
        let r = adaptive_simpson(&f, -10.0, 10.0, 1e-12, 40);
        let root = (2.0 * std::f64::consts::PI).sqrt();
        assert!((r[0] - root).abs() < 1e-9);
        assert!((r[1] - root).abs() < 1e-9);
    }
}
