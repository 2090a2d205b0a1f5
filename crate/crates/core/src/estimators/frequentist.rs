use crate::counts::CountHistogram;
use crate::error::{Error, Result};
use crate::special::{digamma, harmonic_table};

use super::alphabet_size;

/// ξ = e^{-1/2}.
pub const DEFAULT_SCHURMANN_XI: f64 = 0.606_530_659_712_633_4;

/// Plug-in entropy of the empirical frequencies.
pub fn maximum_likelihood(h: &CountHistogram) -> f64 {
    let n = h.total() as f64;
    let mut out = 0.0;
    for (j, f) in h.multiplicities().iter() {
        let p = j as f64 / n;
        out -= f as f64 * p * p.ln();
    }
    out.max(0.0)
}

/// Plug-in entropy plus (m − 1) / 2N.
pub fn miller_madow(h: &CountHistogram) -> f64 {
    maximum_likelihood(h) + (h.support() as f64 - 1.0) / (2.0 * h.total() as f64)
}

/// Σ (n/N)·(ln N − ψ(n) − (−1)^n / (n + 1)).
pub fn grassberger_88(h: &CountHistogram) -> f64 {
    let n = h.total() as f64;
    let ln_n = n.ln();
    h.multiplicities()
        .iter()
        .map(|(j, f)| {
            let jf = j as f64;
            f as f64 * (jf / n) * (ln_n - digamma(jf) - alternating(j) / (jf + 1.0))
        })
        .sum()
}

/// ln N − (1/N)·Σ n·G(n), with G(n) = ψ(n) + ½(−1)^n (ψ((n+1)/2) − ψ(n/2)).
pub fn grassberger_03(h: &CountHistogram) -> f64 {
    let n = h.total() as f64;
    let sum: f64 = h
        .multiplicities()
        .iter()
        .map(|(j, f)| {
            let jf = j as f64;
            let g = digamma(jf)
                + 0.5 * alternating(j) * (digamma((jf + 1.0) / 2.0) - digamma(jf / 2.0));
            f as f64 * jf * g
        })
        .sum();
    n.ln() - sum / n
}

/// ψ(N) − (1/N)·Σ n·(ψ(n) + (−1)^n ∫₀^{1/ξ − 1} t^{n−1}/(1+t) dt).
pub fn schurmann(h: &CountHistogram, xi: f64) -> Result<f64> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::Parameter(format!("xi must be positive, got {xi}")));
    }
    let n = h.total() as f64;
    let upper = 1.0 / xi - 1.0;
    let profile = h.multiplicities();
    let tails = schurmann_tails(upper, profile.max_count());
    let sum: f64 = profile
        .iter()
        .map(|(j, f)| {
            let jf = j as f64;
            f as f64 * jf * (digamma(jf) + alternating(j) * tails(j))
        })
        .sum();
    Ok(digamma(n) - sum / n)
}

/// Returns a lookup for I_j = ∫₀^a t^{j−1}/(1+t) dt, j ≥ 1.
fn schurmann_tails(a: f64, max_j: u64) -> Box<dyn Fn(u64) -> f64> {
    if a == 0.0 {
        return Box::new(|_| 0.0);
    }
    if a.abs() <= 0.5 {
        // alternating power series, at least one bit per term
        return Box::new(move |j| {
            let mut sum = 0.0;
            let mut pow = a.powi(j as i32);
            let mut k = 0u64;
            loop {
                let term = pow / (j + k) as f64;
                if k % 2 == 0 {
                    sum += term;
                } else {
                    sum -= term;
                }
                if term.abs() <= 1e-18 * sum.abs() || pow == 0.0 {
                    break;
                }
                pow *= a;
                k += 1;
            }
            sum
        });
    }
    // I_1 = ln(1 + a), I_j = a^{j−1}/(j−1) − I_{j−1}; absolute errors do not
    // grow, which is all the estimator needs.
    let mut table = Vec::with_capacity(max_j as usize + 1);
    table.push(0.0);
    table.push(a.ln_1p());
    let mut pow = 1.0;
    for j in 2..=max_j.max(1) {
        pow *= a;
        let prev = table[j as usize - 1];
        table.push(pow / (j - 1) as f64 - prev);
    }
    Box::new(move |j| table[j as usize])
}

fn alternating(j: u64) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Coverage-adjusted Horvitz–Thompson estimator.
pub fn chao_shen(h: &CountHistogram) -> f64 {
    let n = h.total();
    let profile = h.multiplicities();
    let mut f1 = profile.singletons();
    if f1 == n {
        f1 = n - 1;
    }
    let nf = n as f64;
    let coverage = 1.0 - f1 as f64 / nf;
    profile
        .iter()
        .map(|(j, f)| {
            let p = coverage * j as f64 / nf;
            // 1 − (1 − p)^N
            let inclusion = -(nf * (-p).ln_1p()).exp_m1();
            f as f64 * (-p * p.ln() / inclusion)
        })
        .sum()
}

/// Zhang's series estimator, summed through its product form.
pub fn zhang(h: &CountHistogram) -> f64 {
    let n = h.total();
    let nf = n as f64;
    let mut out = 0.0;
    for (j, f) in h.multiplicities().iter() {
        let shift = (j - 1) as f64;
        let mut prod = 1.0;
        let mut series = 0.0;
        // the factor at v = N − j + 1 is exactly zero
        for v in 1..=(n - j) {
            prod *= 1.0 - shift / (n - v) as f64;
            if prod <= 0.0 {
                break;
            }
            series += prod / v as f64;
        }
        out += f as f64 * (j as f64 / nf) * series;
    }
    out
}

/// James–Stein shrinkage toward the uniform distribution on `k` cells
/// (default: observed support).
pub fn shrink(h: &CountHistogram, k: Option<u64>) -> Result<f64> {
    let k = alphabet_size(h, k)?;
    let n = h.total();
    let nf = n as f64;
    let target = 1.0 / k as f64;
    let profile = h.multiplicities();
    let unseen = (k - h.support() as u64) as f64;

    let lambda = if n == 1 {
        1.0
    } else {
        let mut sum_sq = 0.0;
        let mut dist = unseen * target * target;
        for (j, f) in profile.iter() {
            let p = j as f64 / nf;
            sum_sq += f as f64 * p * p;
            dist += f as f64 * (target - p) * (target - p);
        }
        if dist == 0.0 {
            1.0
        } else {
            ((1.0 - sum_sq) / ((nf - 1.0) * dist)).clamp(0.0, 1.0)
        }
    };

    let mut out = 0.0;
    for (j, f) in profile.iter() {
        let q = lambda * target + (1.0 - lambda) * j as f64 / nf;
        if q > 0.0 {
            out -= f as f64 * q * q.ln();
        }
    }
    let q0 = lambda * target;
    if unseen > 0.0 && q0 > 0.0 {
        out -= unseen * q0 * q0.ln();
    }
    Ok(out)
}

/// Balanced estimator: (1/(N+2))·Σ (n+1)·Σ_{j=n+2}^{N+2} 1/j.
pub fn bonachela(h: &CountHistogram) -> f64 {
    let n = h.total() as usize;
    let harm = harmonic_table(n + 2);
    let sum: f64 = h
        .multiplicities()
        .iter()
        .map(|(j, f)| {
            let j = j as usize;
            f as f64 * (j + 1) as f64 * (harm[n + 2] - harm[j + 1])
        })
        .sum();
    sum / (n + 2) as f64
}

/// Chao–Wang–Jost estimator: Zhang's leading series plus an unseen-mass term
/// driven by singletons and doubletons.
pub fn chao_wang_jost(h: &CountHistogram) -> f64 {
    let n = h.total();
    let nf = n as f64;
    let profile = h.multiplicities();
    let harm = harmonic_table(n as usize);

    let mut seen = 0.0;
    for (j, f) in profile.iter().filter(|&(j, _)| j < n) {
        let j_us = j as usize;
        seen += f as f64 * (j as f64 / nf) * (harm[n as usize - 1] - harm[j_us - 1]);
    }

    let f1 = profile.singletons();
    let f2 = profile.doubletons();
    let a = if f1 == 0 {
        return seen;
    } else if f2 > 0 {
        2.0 * f2 as f64 / ((nf - 1.0) * f1 as f64 + 2.0 * f2 as f64)
    } else if f1 > 1 {
        2.0 / ((nf - 1.0) * (f1 as f64 - 1.0) + 2.0)
    } else {
        return seen;
    };
    if a >= 1.0 {
        return seen;
    }
    seen + f1 as f64 / nf * unseen_tail(a, n)
}

/// (1−A)^{1−N}·(−ln A − Σ_{r=1}^{N−1} (1−A)^r / r), i.e. Σ_{s≥1} q^s/(s+N−1)
/// with q = 1 − A.
fn unseen_tail(a: f64, n: u64) -> f64 {
    let q = 1.0 - a;
    let offset = (n - 1) as f64;
    let terms_needed = 40.0 / -(-a).ln_1p();
    if terms_needed <= 2e6 {
        let mut sum = 0.0;
        let mut pow = q;
        let mut s = 1.0;
        while pow > 1e-18 * sum {
            sum += pow / (s + offset);
            pow *= q;
            s += 1.0;
        }
        sum
    } else {
        // A tiny: the direct form has no cancellation left to worry about
        let mut partial = 0.0;
        let mut pow = 1.0;
        for r in 1..n {
            pow *= q;
            partial += pow / r as f64;
        }
        (-offset * (-a).ln_1p()).exp() * (-a.ln() - partial)
    }
}
