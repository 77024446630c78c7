//! Zurek's spin-bath measurement model: a two-state system coupled through
//! `sum_k g_k sigma_z (x) sigma_z^k` to `N` environment atoms, with all free
//! energies zero.
//!
//! Basis ordering for full state vectors: the system is the most significant
//! qubit, atom `k` (0-based) sits at bit `N - 1 - k`, and `|+>` is index 0.

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::accuracy::decoherence_exponent;
use crate::error::{invalid, Error, Result};
use crate::operator::{ComplexMatrix, DensityMatrix, HermitianOperator};

/// Largest bath for which full state vectors are assembled.
pub const MAX_BRUTE_FORCE_ATOMS: usize = 14;
const NORM_TOL: f64 = 1e-12;
const COHERENCE_TOL: f64 = 1e-10;
/// Resolution of recurrence-peak refinement in `t`.
const REFINE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct SpinBath {
    couplings: Vec<f64>,
    env: Vec<(C64, C64)>,
    system: (C64, C64),
}

fn check_pair(name: &'static str, (a, b): (C64, C64)) -> Result<()> {
    let norm = a.norm_sqr() + b.norm_sqr();
    if !((norm - 1.0).abs() <= NORM_TOL) {
        return Err(invalid(name, format!("amplitudes have |a|^2 + |b|^2 = {norm}")));
    }
    Ok(())
}

fn random_pair<R: Rng + ?Sized>(rng: &mut R) -> (C64, C64) {
    let p: f64 = rng.random();
    let phi1 = rng.random::<f64>() * std::f64::consts::TAU;
    let phi2 = rng.random::<f64>() * std::f64::consts::TAU;
    (C64::from_polar(p.sqrt(), phi1), C64::from_polar((1.0 - p).sqrt(), phi2))
}

impl SpinBath {
    pub fn new(couplings: Vec<f64>, env: Vec<(C64, C64)>, system: (C64, C64)) -> Result<Self> {
        if couplings.is_empty() {
            return Err(invalid("couplings", "need at least one atom"));
        }
        if couplings.len() != env.len() {
            return Err(Error::DimensionMismatch {
                expected: couplings.len(),
                found: env.len(),
            });
        }
        if let Some(g) = couplings.iter().find(|g| !g.is_finite()) {
            return Err(invalid("couplings", format!("non-finite coupling {g}")));
        }
        for &pair in &env {
            check_pair("env_amplitudes", pair)?;
        }
        check_pair("system_amplitudes", system)?;
        Ok(Self { couplings, env, system })
    }

    /// Couplings uniform in `[g_min, g_max]`, amplitudes uniform on the unit
    /// sphere of `C^2`, for the atoms and the system alike.
    pub fn random<R: Rng + ?Sized>(n: usize, g_min: f64, g_max: f64, rng: &mut R) -> Result<Self> {
        if !(g_min <= g_max) || !g_min.is_finite() || !g_max.is_finite() {
            return Err(invalid("coupling_range", format!("invalid range [{g_min}, {g_max}]")));
        }
        let couplings = (0..n).map(|_| g_min + (g_max - g_min) * rng.random::<f64>()).collect();
        let env = (0..n).map(|_| random_pair(rng)).collect();
        let system = random_pair(rng);
        Self::new(couplings, env, system)
    }

    /// `g_k = k g0` for `k = 1..=n` with every amplitude `1/sqrt 2`.
    pub fn commensurate(n: usize, g0: f64) -> Result<Self> {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new((1..=n).map(|k| k as f64 * g0).collect(), vec![(s, s); n], (s, s))
    }

    pub fn atoms(&self) -> usize {
        self.couplings.len()
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn env_amplitudes(&self) -> &[(C64, C64)] {
        &self.env
    }

    pub fn system_amplitudes(&self) -> (C64, C64) {
        self.system
    }

    /// `H_int = sum_k g_k sigma_z (x) sigma_z^k` on the full `2^(N+1)`
    /// dimensional space.
    pub fn interaction_hamiltonian(&self) -> Result<HermitianOperator> {
        let n = self.check_size()?;
        let diag: Vec<f64> = (0..1usize << (n + 1))
            .map(|idx| {
                let s = spin(idx, n);
                (0..n).map(|k| self.couplings[k] * s * spin(idx, n - 1 - k)).sum()
            })
            .collect();
        Ok(HermitianOperator::from_real_diagonal(&diag))
    }

    /// `(a|+> + b|->) (x)_k (alpha_k|+> + beta_k|->)`.
    pub fn initial_state(&self) -> Result<Vec<C64>> {
        self.state_at(0.0)
    }

    /// Full state vector at time `t`, assembled atom by atom: each atom picks
    /// up `exp(+i g_k t)` when its spin is aligned with the system's and
    /// `exp(-i g_k t)` otherwise.
    pub fn state_at(&self, t: f64) -> Result<Vec<C64>> {
        let n = self.check_size()?;
        let (a, b) = self.system;
        let branch = |aligned: f64| -> Vec<C64> {
            let mut psi = vec![C64::new(1.0, 0.0)];
            for (k, &(alpha, beta)) in self.env.iter().enumerate() {
                let phase = C64::from_polar(1.0, aligned * self.couplings[k] * t);
                let up = alpha * phase;
                let down = beta * phase.conj();
                psi = psi.iter().flat_map(|&c| [c * up, c * down]).collect();
            }
            debug_assert_eq!(psi.len(), 1 << n);
            psi
        };
        let plus = branch(1.0);
        let minus = branch(-1.0);
        Ok(plus
            .iter()
            .map(|&c| a * c)
            .chain(minus.iter().map(|&c| b * c))
            .collect())
    }

    fn check_size(&self) -> Result<usize> {
        let n = self.atoms();
        if n > MAX_BRUTE_FORCE_ATOMS {
            return Err(Error::ResourceLimit {
                atoms: n,
                limit: MAX_BRUTE_FORCE_ATOMS,
            });
        }
        Ok(n)
    }
}

/// `+1` for `|+>`, `-1` for `|->` at bit `bit` of the system-plus-bath index.
fn spin(idx: usize, bit: usize) -> f64 {
    if idx >> bit & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `z(t) = prod_k [cos 2 g_k t + i (|alpha_k|^2 - |beta_k|^2) sin 2 g_k t]`.
pub fn z_ideal(bath: &SpinBath, t: f64) -> C64 {
    bath.couplings
        .iter()
        .zip(&bath.env)
        .map(|(&g, &(alpha, beta))| {
            let (s, c) = (2.0 * g * t).sin_cos();
            C64::new(c, (alpha.norm_sqr() - beta.norm_sqr()) * s)
        })
        .product()
}

/// Coherence factor from the full state vector: the `|+><-|` entry of the
/// reduced density matrix divided by `a b*`.
pub fn brute_force_z(bath: &SpinBath, t: f64) -> Result<C64> {
    let (a, b) = bath.system;
    let ab = a * b.conj();
    if ab.norm() < f64::MIN_POSITIVE {
        return Err(Error::UndefinedCoherence);
    }
    let psi = bath.state_at(t)?;
    Ok(reduced_coherence(&psi) / ab)
}

/// `sum_e psi(+, e) psi(-, e)*`, the off-diagonal entry after tracing out the
/// bath.
pub(crate) fn reduced_coherence(psi: &[C64]) -> C64 {
    let half = psi.len() / 2;
    psi[..half].iter().zip(&psi[half..]).map(|(p, m)| p * m.conj()).sum()
}

/// Total suppression exponent `sum_k (2 g_k)^2 T_planck^(4/3) t^(2/3)`.
pub fn suppression_exponent(bath: &SpinBath, t: f64, t_planck: f64) -> f64 {
    bath.couplings
        .iter()
        .map(|&g| decoherence_exponent(2.0 * g, t, t_planck))
        .sum()
}

/// `z(t)` under real-clock evolution.
pub fn z_realclock(bath: &SpinBath, t: f64, t_planck: f64) -> C64 {
    z_ideal(bath, t) * (-suppression_exponent(bath, t, t_planck)).exp()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedState {
    /// `|a|^2`, `|b|^2`.
    pub populations: [f64; 2],
    pub coherence: C64,
}

/// `rho_c = |a|^2 |+><+| + |b|^2 |-><-| + z a b* |+><-| + h.c.`
pub fn reduced_density(bath: &SpinBath, z: C64) -> Result<(ReducedState, DensityMatrix)> {
    let modulus = z.norm();
    if !(modulus <= 1.0 + COHERENCE_TOL) {
        return Err(Error::InvalidCoherence { modulus });
    }
    let (a, b) = bath.system;
    let off = z * a * b.conj();
    let m = ComplexMatrix::from_row_slice(
        2,
        &[
            C64::new(a.norm_sqr(), 0.0),
            off,
            off.conj(),
            C64::new(b.norm_sqr(), 0.0),
        ],
    )?;
    let state = ReducedState {
        populations: [a.norm_sqr(), b.norm_sqr()],
        coherence: z,
    };
    Ok((state, DensityMatrix::new(m)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoherenceMode {
    Ideal,
    RealClock { t_planck: f64 },
}

impl CoherenceMode {
    pub fn z(&self, bath: &SpinBath, t: f64) -> C64 {
        match *self {
            CoherenceMode::Ideal => z_ideal(bath, t),
            CoherenceMode::RealClock { t_planck } => z_realclock(bath, t, t_planck),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceScan {
    /// `(t, |z(t)|)` on the uniform grid over `[0, horizon]`.
    pub samples: Vec<(f64, f64)>,
    /// Refined local maxima of `|z|` above the threshold.
    pub exceedances: Vec<(f64, f64)>,
    /// Supremum of `|z|` over `[t, horizon]` for each grid `t`, including
    /// refined peaks.
    pub running_sup: Vec<f64>,
}

/// Samples `|z|` on `n_samples` uniform points of `[0, horizon]`, refines every
/// local maximum by golden-section search and reports those above
/// `threshold`.
pub fn recurrence_scan(
    bath: &SpinBath,
    mode: CoherenceMode,
    horizon: f64,
    n_samples: usize,
    threshold: f64,
) -> Result<RecurrenceScan> {
    if n_samples < 1000 {
        return Err(invalid("n_samples", format!("need at least 1000, got {n_samples}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid("horizon", format!("must be positive, got {horizon}")));
    }
    if !(threshold > 0.0) {
        return Err(invalid("threshold", format!("must be positive, got {threshold}")));
    }
    if let CoherenceMode::RealClock { t_planck } = mode {
        if !(t_planck > 0.0 && t_planck.is_finite()) {
            return Err(invalid("t_planck", format!("must be positive, got {t_planck}")));
        }
    }
    let f = |t: f64| mode.z(bath, t).norm();
    let last = (n_samples - 1) as f64;
    let samples: Vec<(f64, f64)> = (0..n_samples)
        .map(|i| {
            let t = horizon * i as f64 / last;
            (t, f(t))
        })
        .collect();

    let mut peaks = Vec::new();
    for i in 0..n_samples {
        let v = samples[i].1;
        let left = if i > 0 { samples[i - 1].1 } else { f64::NEG_INFINITY };
        let right = if i + 1 < n_samples {
            samples[i + 1].1
        } else {
            f64::NEG_INFINITY
        };
        if v >= left && v > right || v > left && v >= right {
            let lo = samples[i.saturating_sub(1)].0;
            let hi = samples[(i + 1).min(n_samples - 1)].0;
            let (t, m) = golden_max(&f, lo, hi);
            peaks.push(if m >= v { (t, m) } else { samples[i] });
        }
    }
    let exceedances = peaks.iter().copied().filter(|&(_, m)| m > threshold).collect();

    let mut running_sup = vec![0.0; n_samples];
    let mut sup = f64::NEG_INFINITY;
    let mut peak_iter = peaks.iter().rev().peekable();
    for i in (0..n_samples).rev() {
        let (t, v) = samples[i];
        sup = sup.max(v);
        while let Some(&&(tp, m)) = peak_iter.peek() {
            if tp < t {
                break;
            }
            sup = sup.max(m);
            peak_iter.next();
        }
        running_sup[i] = sup;
    }
    Ok(RecurrenceScan {
        samples,
        exceedances,
        running_sup,
    })
}

/// Maximum of a unimodal function on `[lo, hi]`.
fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > REFINE_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}
