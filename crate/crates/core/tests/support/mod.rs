//! Independent oracles and study generators shared by the integration and
//! acceptance suites. Nothing here calls the production pmf or likelihood
//! code it is used to check, except where noted.
#![allow(dead_code)]

use contagion_core::estimate::{RegimeTally, SectorPanel};
use contagion_core::model::{RegimeParams, SectorState};
use contagion_core::simulate::{generate_episodes, SimConfig, SimModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_regime_params(rng: &mut ChaCha8Rng) -> RegimeParams {
    let mut draw = || std::array::from_fn(|_| rng.random::<f64>());
    let a = draw();
    let b = draw();
    RegimeParams::new(a, b).unwrap()
}

fn softplus(v: f64) -> f64 {
    if v > 0.0 {
        v + (-v).exp().ln_1p()
    } else {
        v.exp().ln_1p()
    }
}

/// `∫_0^1 t^(a-1) (1-t)^(b-1) dt` by tanh-sinh quadrature. With
/// `t = 1 / (1 + exp(-π sinh u))` both `ln t` and `ln(1-t)` are exact in
/// the tails, so endpoint singularities for shapes below one are harmless.
pub fn beta_integral(a: f64, b: f64) -> f64 {
    let h = 1.0 / 128.0;
    let half_width = 8.0;
    let steps = (half_width / h) as i64;
    let mut sum = 0.0;
    for i in -steps..=steps {
        let u = i as f64 * h;
        let z = std::f64::consts::PI * u.sinh();
        let ln_t = -softplus(-z);
        let ln_1mt = -softplus(z);
        // dt/du = π cosh(u) t (1-t); the t (1-t) factor is folded into the exponents.
        let log_term = a * ln_t + b * ln_1mt + (std::f64::consts::PI * u.cosh()).ln();
        sum += log_term.exp();
    }
    sum * h
}

/// Exact binomial coefficient for small arguments.
pub fn choose(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * u128::from(n - i) / u128::from(i + 1);
    }
    c as f64
}

/// `C(x, y) ∫ p^y (1-p)^(x-y) Beta(p; a1, a2) dp` entirely by quadrature.
pub fn beta_binomial_by_quadrature(x: u32, y: u32, a1: f64, a2: f64) -> f64 {
    choose(x, y) * beta_integral(f64::from(y) + a1, f64::from(x - y) + a2) / beta_integral(a1, a2)
}

/// Golden-section search for the maximizer of `f` on `[lo, hi]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    // Boundary optima: golden section never evaluates the end points.
    [lo.max(0.0), mid, hi.min(1.0)]
        .into_iter()
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap()
}

/// Binomial log-likelihood of a panel written out term by term from the
/// product of per-period binomial probabilities, independent of the crate's
/// likelihood code.
pub fn direct_log_likelihood(panels: &[SectorPanel], a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let ln_choose = |n: u32, k: u32| -> f64 { (1..=k).map(|i| (f64::from(n - k + i) / f64::from(i)).ln()).sum() };
    let term = |n: u32, k: u32, p: f64| -> f64 {
        let mut v = ln_choose(n, k);
        if k > 0 {
            v += f64::from(k) * p.ln();
        }
        if n > k {
            v += f64::from(n - k) * (1.0 - p).ln();
        }
        v
    };
    let mut total = 0.0;
    for panel in panels {
        for w in panel.periods().windows(2) {
            let (now, next) = (w[0], w[1]);
            let ia = match (now.y1 > 0, now.y2 > 0) {
                (false, false) => 0,
                (true, false) => 1,
                (false, true) => 2,
                (true, true) => 3,
            };
            let ib = match (now.y2 > 0, now.y1 > 0) {
                (false, false) => 0,
                (true, false) => 1,
                (false, true) => 2,
                (true, true) => 3,
            };
            total += term(now.x1, next.y1, a[ia]) + term(now.x2, next.y2, b[ib]);
        }
    }
    total
}

/// Coordinate-wise golden-section maximization of the direct likelihood over
/// `[0, 1]^8`, two sweeps from the centre.
pub fn numeric_mle(panels: &[SectorPanel]) -> ([f64; 4], [f64; 4]) {
    let mut a = [0.5; 4];
    let mut b = [0.5; 4];
    for _ in 0..2 {
        for i in 0..8 {
            let best = golden_max(
                |v| {
                    let (mut aa, mut bb) = (a, b);
                    if i < 4 {
                        aa[i] = v;
                    } else {
                        bb[i - 4] = v;
                    }
                    direct_log_likelihood(panels, &aa, &bb)
                },
                0.0,
                1.0,
                1e-11,
            );
            if i < 4 {
                a[i] = best;
            } else {
                b[i - 4] = best;
            }
        }
    }
    (a, b)
}

/// Episodes simulated under `model` from `initial` until every
/// (sector, regime) pair has accumulated at least `min_exposure` survivor
/// periods. Chunks use consecutive seeds starting at `seed`.
pub fn episodes_until_exposure(
    model: SimModel,
    initial: SectorState,
    seed: u64,
    min_exposure: u64,
) -> Vec<SectorPanel> {
    let mut episodes = Vec::new();
    let mut chunk_seed = seed;
    loop {
        let cfg = SimConfig::new(chunk_seed, model, initial);
        episodes.extend(generate_episodes(&cfg, 500).unwrap());
        chunk_seed = chunk_seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let tally = RegimeTally::from_panels(&episodes);
        if tally.exposures.iter().flatten().all(|&e| e >= min_exposure) {
            return episodes;
        }
    }
}
