//! Certification of real eventual exponential positivity (rEEP): a matrix
//! `M` is rEEP when `Re(e^{Mt})` is entrywise strictly positive for all
//! `t` beyond some onset `t₀`.
//!
//! Three independent criteria are implemented:
//!
//! * **sampling** — evaluate `Re(e^{Mt})` on a geometric time grid and
//!   confirm the asymptotics against the rank-1 limit of the flow;
//! * **shifted_pf** — build `B = M + dI` for an analytically chosen shift
//!   `d` and certify the strong complex Perron-Frobenius property of `B`
//!   through its dominant eigenvectors;
//! * **spectral_class** — for graph classes with a known equivalence
//!   (unsigned undirected, signed undirected with complex-symmetric `L`,
//!   unsigned weight-balanced strongly connected digraphs), decide from
//!   corank or eigenvalue locations alone.
//!
//! [`equivalence_audit`] cross-checks the criteria against each other and
//! flags any disagreement as a numerical or theoretical anomaly.

use serde::Serialize;
use thiserror::Error;

use crate::netmodel::GraphClass;
use crate::numkernel::{
    eig, frobenius_norm, max_abs, nullspace, CMatrix, CVector, EigenDecomposition, KernelError,
    Scalar,
};
use crate::spectral::{
    corank, psd_corank1_of_spectrum, rank_one_projector, symmetric_part, LaplacianBundle,
    SpectralError, DEFAULT_ZERO_TOL,
};

/// Default number of grid points for sampling-based certification.
pub const DEFAULT_SAMPLES: usize = 64;
/// Default absolute positivity threshold; separates "converges to a
/// positive limit" from "converges to zero".
pub const DEFAULT_EPS_POS: f64 = 1e-12;
/// Divergence threshold on the matrix-exponential entries.
pub const DIVERGENCE_LIMIT: f64 = 1e12;
/// Absolute slack for the entrywise set-membership inequalities of the
/// dominant eigenvectors (`Re(v) ≥ |Im(v)|`); unit-norm vectors within this
/// slack of the boundary are not certified.
pub const SET_O_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ReepError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("need at least 16 samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("spectrum must contain exactly one zero eigenvalue, found {found}")]
    NonsimpleZero { found: usize },
    #[error("nonzero eigenvalue {value} has non-positive real part; no valid shift exists")]
    NonpositiveRealPart { value: Scalar },
    #[error("graph class {class:?} is outside the theorem families")]
    OutsideTheoremClasses { class: GraphClass },
}

/// Evidence about the dominant eigenvalue and eigenvectors of a matrix.
#[derive(Debug, Clone, Serialize)]
pub struct PfReport {
    pub dominant_eigenvalue: (f64, f64),
    /// No other eigenvalue coincides with the dominant one within the gap
    /// tolerance.
    pub is_simple: bool,
    /// `|λ₁| > |λ_j| + ε_gap` for every other eigenvalue.
    pub strictly_dominant: bool,
    /// `Re(x) > 0` entrywise for the phase-fixed dominant right eigenvector.
    pub right_vector_ok: bool,
    /// `Re(v) ≥ |Im(v)|` entrywise for both dominant eigenvectors, the
    /// sufficient set-membership condition for the strong complex PF
    /// property.
    pub in_set_o: bool,
    /// Present when the flags were set conservatively false (defective
    /// decomposition or borderline inequalities).
    pub diagnostic: Option<String>,
}

impl PfReport {
    /// Strong complex PF property: dominant eigenvalue real positive,
    /// simple, strictly dominant in modulus, with an entrywise-positive
    /// real part of the right eigenvector.
    pub fn satisfies_strong_pf(&self) -> bool {
        let (re, im) = self.dominant_eigenvalue;
        re > 0.0
            && im.abs() <= SET_O_SLACK * re.max(1.0)
            && self.is_simple
            && self.strictly_dominant
            && self.right_vector_ok
    }
}

/// Computes the dominant-eigenpair evidence for `M`.
///
/// The dominance gap is `1e-8·ρ(M)`. A defective decomposition sets every
/// flag conservatively false and records a diagnostic instead of failing.
pub fn strong_pf_check(m: &CMatrix) -> Result<PfReport, ReepError> {
    let dec = eig(m)?;
    let n = dec.len();
    let dominant = dec.eigenvalues[n - 1];
    if dec.is_defective {
        return Ok(PfReport {
            dominant_eigenvalue: (dominant.re, dominant.im),
            is_simple: false,
            strictly_dominant: false,
            right_vector_ok: false,
            in_set_o: false,
            diagnostic: Some(
                "eigendecomposition is defective; flags set conservatively false".into(),
            ),
        });
    }
    let rho = dec.spectral_radius();
    let gap = 1e-8 * rho;
    let mut is_simple = true;
    let mut strictly_dominant = true;
    for j in 0..n - 1 {
        let lam = dec.eigenvalues[j];
        if (lam - dominant).norm() <= gap {
            is_simple = false;
        }
        if lam.norm() + gap >= dominant.norm() {
            strictly_dominant = false;
        }
    }
    let x = dec.right(n - 1);
    let z = dec.left(n - 1);
    let right_vector_ok = x.iter().all(|v| v.re > 0.0);
    let in_set_o = in_set_o(&x) && in_set_o(&z);
    Ok(PfReport {
        dominant_eigenvalue: (dominant.re, dominant.im),
        is_simple,
        strictly_dominant,
        right_vector_ok,
        in_set_o,
        diagnostic: None,
    })
}

/// `Re(v) ≥ |Im(v)|` entrywise with [`SET_O_SLACK`] kept clear of the
/// boundary, for a phase-fixed unit vector.
fn in_set_o(v: &CVector) -> bool {
    v.iter().all(|z| z.re - z.im.abs() >= SET_O_SLACK)
}

/// Shift that makes `B = dI − L` strongly Perron-Frobenius at the zero
/// eigenvalue of `L`: `d = 1.01 · max |λ|²/(2·Re λ)` over the nonzero
/// eigenvalues, which guarantees `|d − λ| < d` for each of them, so
/// `ρ(B) = d` is attained at `λ = 0` and is strictly dominant.
///
/// Requires exactly one zero eigenvalue and every other eigenvalue in the
/// open right half-plane.
pub fn shift_d(spectrum: &[Scalar]) -> Result<f64, ReepError> {
    let scale = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cut = DEFAULT_ZERO_TOL * scale;
    let zeros = spectrum.iter().filter(|z| z.norm() <= cut).count();
    if zeros != 1 {
        return Err(ReepError::NonsimpleZero { found: zeros });
    }
    let mut threshold = 0.0f64;
    for z in spectrum.iter().filter(|z| z.norm() > cut) {
        if z.re <= cut {
            return Err(ReepError::NonpositiveRealPart { value: *z });
        }
        threshold = threshold.max(z.norm_sqr() / (2.0 * z.re));
    }
    Ok(1.01 * threshold)
}

/// Outcome of a certification attempt. `Inconclusive` is a valid result:
/// rEEP is undecidable by finite sampling alone, and the class-conditional
/// criteria do not cover every graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Reep,
    NotReep,
    Inconclusive,
}

/// Which criterion produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Sampling,
    ShiftedPf,
    SpectralClass,
}

/// Verdict plus the evidence chain behind it.
#[derive(Debug, Clone, Serialize)]
pub struct ReepCertificate {
    pub verdict: Verdict,
    pub criterion: Criterion,
    /// Shift used by the PF certificate, when `criterion = shifted_pf`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift_d: Option<f64>,
    /// Estimated positivity onset, when `criterion = sampling` and the
    /// verdict is `Reep`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0_estimate: Option<f64>,
    /// Failing entry or eigenvalue when the verdict is `NotReep`, or the
    /// reason a verdict could not be reached.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl ReepCertificate {
    fn new(verdict: Verdict, criterion: Criterion) -> Self {
        Self {
            verdict,
            criterion,
            shift_d: None,
            t0_estimate: None,
            witness: None,
        }
    }

    fn with_witness(mut self, witness: String) -> Self {
        self.witness = Some(witness);
        self
    }
}

/// Default sampling horizon for `e^{Mt}`: long enough for the transient to
/// decay to ~1e-9 (20 over the decay gap) and, when a growing mode exists,
/// long enough for divergence to cross [`DIVERGENCE_LIMIT`] (30 over the
/// growth rate).
pub fn default_sampling_horizon(m: &CMatrix) -> Result<f64, ReepError> {
    let dec = eig(m)?;
    Ok(horizon_from_spectrum(&dec, frobenius_norm(m)))
}

fn horizon_from_spectrum(dec: &EigenDecomposition, scale: f64) -> f64 {
    let cut = DEFAULT_ZERO_TOL * scale;
    let mut decay: Option<f64> = None;
    let mut growth: Option<f64> = None;
    for z in dec.eigenvalues.iter() {
        if z.re < -cut {
            let rate = -z.re;
            decay = Some(decay.map_or(rate, |d: f64| d.min(rate)));
        } else if z.re > cut {
            growth = Some(growth.map_or(z.re, |g: f64| g.min(z.re)));
        }
    }
    let mut t = 0.0f64;
    if let Some(d) = decay {
        t = t.max(20.0 / d);
    }
    if let Some(g) = growth {
        t = t.max(30.0 / g);
    }
    if t == 0.0 {
        t = 20.0;
    }
    t
}

/// Sampling-based certification: evaluates `Re(e^{M·t_k})` on a geometric
/// grid over `(t_max/1000, t_max]`.
///
/// The verdict is `Reep` when strict positivity holds from some grid index
/// onward **and** the rank-1 limit of the flow exists with strictly
/// positive real part (asymptotic confirmation); `NotReep` when the limit
/// exists with a non-positive real entry or the trajectory diverges;
/// `Inconclusive` otherwise. A violation of monotone positivity onset
/// (entries above `2·eps_pos` followed by a non-positive entry) downgrades
/// the verdict to `Inconclusive`.
pub fn reep_by_sampling(
    m: &CMatrix,
    t_max: f64,
    samples: usize,
    eps_pos: f64,
) -> Result<ReepCertificate, ReepError> {
    if samples < 16 {
        return Err(ReepError::TooFewSamples(samples));
    }
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(ReepError::InvalidArgument(format!(
            "t_max must be positive and finite, got {t_max}"
        )));
    }
    if !(eps_pos >= 0.0) {
        return Err(ReepError::InvalidArgument(format!(
            "eps_pos must be non-negative, got {eps_pos}"
        )));
    }
    let dec = eig(m)?;
    let scale = frobenius_norm(m);
    let cut = DEFAULT_ZERO_TOL * scale;

    // Rank-1 asymptotics: available when the zero eigenvalue is simple and
    // every other eigenvalue decays.
    let zero_count = dec.eigenvalues.iter().filter(|z| z.norm() <= cut).count();
    let all_others_decay = dec
        .eigenvalues
        .iter()
        .filter(|z| z.norm() > cut)
        .all(|z| z.re < -cut);
    let limit = if zero_count == 1 && all_others_decay && !dec.is_defective {
        let (rights, lefts) = nullspace(m, DEFAULT_ZERO_TOL)?;
        match (rights.first(), lefts.first()) {
            (Some(x), Some(z)) if rights.len() == 1 => rank_one_projector(x, z),
            _ => None,
        }
    } else {
        None
    };

    let t_lo = t_max / 1000.0;
    let ratio = (t_max / t_lo).powf(1.0 / (samples as f64 - 1.0));
    let mut times = Vec::with_capacity(samples);
    for k in 0..samples {
        times.push(t_lo * ratio.powi(k as i32));
    }
    times[samples - 1] = t_max;

    let mut min_entries: Vec<f64> = Vec::with_capacity(samples);
    let mut diverged_at: Option<f64> = None;
    for &t in &times {
        let scaled = m.mapv(|z| z * t);
        match crate::numkernel::expm(&scaled) {
            Ok(e) => {
                if max_abs(&e) > DIVERGENCE_LIMIT {
                    diverged_at = Some(t);
                    break;
                }
                let min_re = e.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
                min_entries.push(min_re);
            }
            Err(KernelError::ExpmSaturated) => {
                diverged_at = Some(t);
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }

    if let Some(t) = diverged_at {
        return Ok(ReepCertificate::new(Verdict::NotReep, Criterion::Sampling)
            .with_witness(format!(
                "matrix exponential exceeded {DIVERGENCE_LIMIT:.0e} at t = {t:.6e}"
            )));
    }

    // Monotone positivity onset check (only meaningful when the transient
    // provably decays): once all entries clear 2·eps_pos, a later
    // non-positive entry is a numerical anomaly.
    if limit.is_some() {
        if let Some(k1) = min_entries.iter().position(|&v| v > 2.0 * eps_pos) {
            for (k2, &v) in min_entries.iter().enumerate().skip(k1 + 1) {
                if v <= 0.0 {
                    return Ok(ReepCertificate::new(
                        Verdict::Inconclusive,
                        Criterion::Sampling,
                    )
                    .with_witness(format!(
                        "positivity onset at t = {:.6e} was not monotone (entry {v:.3e} at t = {:.6e})",
                        times[k1], times[k2]
                    )));
                }
            }
        }
    }

    if let Some(lim) = &limit {
        let (mut worst, mut worst_idx) = (f64::INFINITY, (0usize, 0usize));
        for ((i, j), z) in lim.indexed_iter() {
            if z.re < worst {
                worst = z.re;
                worst_idx = (i, j);
            }
        }
        if worst <= eps_pos {
            return Ok(ReepCertificate::new(Verdict::NotReep, Criterion::Sampling)
                .with_witness(format!(
                    "limit entry ({},{}) has real part {worst:.3e} ≤ {eps_pos:.1e}",
                    worst_idx.0, worst_idx.1
                )));
        }
        // onset: earliest grid index from which all later samples stay
        // strictly positive
        let mut onset: Option<usize> = None;
        for k in (0..min_entries.len()).rev() {
            if min_entries[k] > eps_pos {
                onset = Some(k);
            } else {
                break;
            }
        }
        if let Some(k0) = onset {
            let mut cert = ReepCertificate::new(Verdict::Reep, Criterion::Sampling);
            cert.t0_estimate = Some(times[k0]);
            return Ok(cert);
        }
        return Ok(
            ReepCertificate::new(Verdict::Inconclusive, Criterion::Sampling).with_witness(
                "limit is positive but positivity was not observed within the horizon".into(),
            ),
        );
    }

    Ok(
        ReepCertificate::new(Verdict::Inconclusive, Criterion::Sampling).with_witness(
            "no rank-1 limit is available to confirm the asymptotics".into(),
        ),
    )
}

/// Sampling with the default horizon, grid size, and positivity threshold.
pub fn reep_by_sampling_auto(m: &CMatrix) -> Result<ReepCertificate, ReepError> {
    let horizon = default_sampling_horizon(m)?;
    reep_by_sampling(m, horizon, DEFAULT_SAMPLES, DEFAULT_EPS_POS)
}

/// Shifted-matrix strong-PF certificate for a generator `M` (typically
/// `−L` or `−L†`).
///
/// Chooses `d` from the spectrum of `−M` via [`shift_d`], forms
/// `B = M + dI`, and certifies rEEP when `B` has the strong complex PF
/// property with both dominant eigenvectors inside the sufficient set
/// (`Re(v) ≥ |Im(v)|` entrywise, which covers `B` and `B^H` at once). This
/// criterion is sufficient only: failure to certify yields `Inconclusive`,
/// never `NotReep`.
pub fn reep_by_shifted_pf(m: &CMatrix) -> Result<ReepCertificate, ReepError> {
    let dec = eig(m)?;
    let negated: Vec<Scalar> = dec.eigenvalues.iter().map(|z| -z).collect();
    let d = match shift_d(&negated) {
        Ok(d) => d,
        Err(ReepError::NonsimpleZero { found }) => {
            return Ok(
                ReepCertificate::new(Verdict::Inconclusive, Criterion::ShiftedPf).with_witness(
                    format!("no valid shift: spectrum has {found} zero eigenvalues"),
                ),
            );
        }
        Err(ReepError::NonpositiveRealPart { value }) => {
            return Ok(
                ReepCertificate::new(Verdict::Inconclusive, Criterion::ShiftedPf).with_witness(
                    format!("no valid shift: eigenvalue {value} of −M has non-positive real part"),
                ),
            );
        }
        Err(e) => return Err(e),
    };
    let n = m.nrows();
    let mut b = m.clone();
    for i in 0..n {
        b[(i, i)] += d;
    }
    let report = strong_pf_check(&b)?;
    if report.satisfies_strong_pf() && report.in_set_o {
        let mut cert = ReepCertificate::new(Verdict::Reep, Criterion::ShiftedPf);
        cert.shift_d = Some(d);
        Ok(cert)
    } else {
        let mut cert = ReepCertificate::new(Verdict::Inconclusive, Criterion::ShiftedPf)
            .with_witness(format!(
                "B = M + {d:.6}·I failed the PF certificate: simple={}, dominant={}, \
                 right_vector_ok={}, in_set_o={}{}",
                report.is_simple,
                report.strictly_dominant,
                report.right_vector_ok,
                report.in_set_o,
                report
                    .diagnostic
                    .as_deref()
                    .map(|d| format!(" ({d})"))
                    .unwrap_or_default()
            ));
        cert.shift_d = Some(d);
        Ok(cert)
    }
}

/// The three graph families with a class-conditional criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremClass {
    /// Unsigned undirected: rEEP ⟺ corank 1.
    UnsignedUndirected,
    /// Signed undirected with complex-symmetric `L`: rEEP ⟺ `L` psd of
    /// corank 1.
    SignedUndirected,
    /// Unsigned strongly connected weight-balanced digraph: rEEP ⟺ corank 1.
    BalancedUnsignedDigraph,
}

/// Which family the structure report falls in, if any.
pub fn theorem_class(structure: &StructureFacts) -> Option<TheoremClass> {
    match structure.class {
        GraphClass::UnsignedUndirected => Some(TheoremClass::UnsignedUndirected),
        GraphClass::SignedUndirected => Some(TheoremClass::SignedUndirected),
        GraphClass::UnsignedDigraph if structure.connected && structure.weight_balanced => {
            Some(TheoremClass::BalancedUnsignedDigraph)
        }
        _ => None,
    }
}

/// The structural facts the class decision needs.
#[derive(Debug, Clone, Copy)]
pub struct StructureFacts {
    pub class: GraphClass,
    pub connected: bool,
    pub weight_balanced: bool,
}

impl From<&crate::netmodel::StructureReport> for StructureFacts {
    fn from(s: &crate::netmodel::StructureReport) -> Self {
        Self {
            class: s.graph_class,
            connected: s.connected,
            weight_balanced: s.weight_balanced,
        }
    }
}

/// Class-conditional spectral criterion for `−L`.
///
/// * unsigned undirected → rEEP iff corank 1;
/// * signed undirected (complex symmetric `L`) → rEEP iff `L` is psd of
///   corank 1;
/// * unsigned weight-balanced strongly connected digraph → rEEP iff
///   corank 1;
/// * any other class → inconclusive (no criterion; such graphs may still
///   reach consensus without rEEP).
pub fn reep_by_spectrum(bundle: &LaplacianBundle) -> ReepCertificate {
    let facts = StructureFacts::from(&bundle.structure);
    match theorem_class(&facts) {
        Some(TheoremClass::UnsignedUndirected) | Some(TheoremClass::BalancedUnsignedDigraph) => {
            if bundle.corank == 1 {
                ReepCertificate::new(Verdict::Reep, Criterion::SpectralClass)
            } else {
                ReepCertificate::new(Verdict::NotReep, Criterion::SpectralClass)
                    .with_witness(format!("zero eigenvalue is not simple (corank = {})", bundle.corank))
            }
        }
        Some(TheoremClass::SignedUndirected) => {
            let cut = DEFAULT_ZERO_TOL * frobenius_norm(&bundle.laplacian);
            if psd_corank1_of_spectrum(&bundle.spectrum.eigenvalues, cut) {
                ReepCertificate::new(Verdict::Reep, Criterion::SpectralClass)
            } else {
                ReepCertificate::new(Verdict::NotReep, Criterion::SpectralClass)
                    .with_witness(psd_witness(&bundle.spectrum.eigenvalues, cut))
            }
        }
        None => ReepCertificate::new(Verdict::Inconclusive, Criterion::SpectralClass)
            .with_witness("no spectral criterion covers this graph class".into()),
    }
}

/// The same class-conditional criterion applied to `−L†` (the verdict the
/// equivalence chains predict to match [`reep_by_spectrum`]).
pub fn reep_pinv_by_spectrum(bundle: &LaplacianBundle) -> Result<ReepCertificate, ReepError> {
    let facts = StructureFacts::from(&bundle.structure);
    Ok(match theorem_class(&facts) {
        Some(TheoremClass::UnsignedUndirected) | Some(TheoremClass::BalancedUnsignedDigraph) => {
            let k = corank(&bundle.pinv, DEFAULT_ZERO_TOL)?;
            if k == 1 {
                ReepCertificate::new(Verdict::Reep, Criterion::SpectralClass)
            } else {
                ReepCertificate::new(Verdict::NotReep, Criterion::SpectralClass)
                    .with_witness(format!("pseudoinverse corank = {k}"))
            }
        }
        Some(TheoremClass::SignedUndirected) => {
            let dec = eig(&bundle.pinv)?;
            let cut = DEFAULT_ZERO_TOL * frobenius_norm(&bundle.pinv);
            if psd_corank1_of_spectrum(&dec.eigenvalues, cut) {
                ReepCertificate::new(Verdict::Reep, Criterion::SpectralClass)
            } else {
                ReepCertificate::new(Verdict::NotReep, Criterion::SpectralClass)
                    .with_witness(psd_witness(&dec.eigenvalues, cut))
            }
        }
        None => ReepCertificate::new(Verdict::Inconclusive, Criterion::SpectralClass)
            .with_witness("no spectral criterion covers this graph class".into()),
    })
}

fn psd_witness(eigenvalues: &CVector, cut: f64) -> String {
    let zeros = eigenvalues.iter().filter(|z| z.norm() <= cut).count();
    if zeros != 1 {
        return format!("zero eigenvalue is not simple ({zeros} within tolerance)");
    }
    let offender = eigenvalues
        .iter()
        .filter(|z| z.norm() > cut && z.re <= cut)
        .min_by(|a, b| a.re.total_cmp(&b.re));
    match offender {
        Some(z) => format!("eigenvalue {z} lies outside the open right half-plane"),
        None => "psd-of-corank-1 test failed".into(),
    }
}

/// One clause of an equivalence chain: `value = None` means the criterion
/// was inconclusive on this input.
#[derive(Debug, Clone, Serialize)]
pub struct AuditClause {
    pub label: String,
    pub value: Option<bool>,
    pub detail: String,
}

/// Independent evaluations of every clause of the applicable equivalence
/// chain. `agreement` is true when no two conclusive clauses disagree;
/// disagreement indicates a numerical or theoretical anomaly and carries
/// full evidence in the clause details.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceAudit {
    pub class: TheoremClass,
    pub clauses: Vec<AuditClause>,
    pub agreement: bool,
}

/// Cross-checks the equivalence chain for the bundle's graph class.
///
/// * unsigned undirected: corank(L) = 1, sampling(−L), psd(L†),
///   sampling(−L†) — the corollary's psd clause is applied to `+L†`; as
///   printed (`−L†` psd) it is unsatisfiable because spec(−L†) lies in the
///   closed left half-plane.
/// * signed undirected: psd(L), sampling(−L), psd(L†), sampling(−L†).
/// * balanced unsigned digraph: sampling(−L), corank(L†) = 1,
///   sampling(−L†), psd of corank 1 of the Hermitian part of `L†`.
pub fn equivalence_audit(bundle: &LaplacianBundle) -> Result<EquivalenceAudit, ReepError> {
    let facts = StructureFacts::from(&bundle.structure);
    let class = theorem_class(&facts).ok_or(ReepError::OutsideTheoremClasses {
        class: bundle.structure.graph_class,
    })?;
    let neg_l = bundle.laplacian.mapv(|z| -z);
    let neg_pinv = bundle.pinv.mapv(|z| -z);
    let l_cut = DEFAULT_ZERO_TOL * frobenius_norm(&bundle.laplacian);
    let p_cut = DEFAULT_ZERO_TOL * frobenius_norm(&bundle.pinv);

    let mut clauses = Vec::new();
    match class {
        TheoremClass::UnsignedUndirected => {
            clauses.push(AuditClause {
                label: "corank(L) = 1".into(),
                value: Some(bundle.corank == 1),
                detail: format!("corank = {}", bundle.corank),
            });
            clauses.push(sampling_clause("-L is rEEP (sampling)", &neg_l)?);
            clauses.push(psd_clause("L† is psd of corank 1", &bundle.pinv, p_cut)?);
            clauses.push(sampling_clause("-L† is rEEP (sampling)", &neg_pinv)?);
        }
        TheoremClass::SignedUndirected => {
            clauses.push(AuditClause {
                label: "L is psd of corank 1".into(),
                value: Some(psd_corank1_of_spectrum(&bundle.spectrum.eigenvalues, l_cut)),
                detail: format!("spectrum cutoff {l_cut:.3e}"),
            });
            clauses.push(sampling_clause("-L is rEEP (sampling)", &neg_l)?);
            clauses.push(psd_clause("L† is psd of corank 1", &bundle.pinv, p_cut)?);
            clauses.push(sampling_clause("-L† is rEEP (sampling)", &neg_pinv)?);
        }
        TheoremClass::BalancedUnsignedDigraph => {
            clauses.push(sampling_clause("-L is rEEP (sampling)", &neg_l)?);
            let k = corank(&bundle.pinv, DEFAULT_ZERO_TOL)?;
            clauses.push(AuditClause {
                label: "L† has a simple zero eigenvalue".into(),
                value: Some(k == 1),
                detail: format!("corank(L†) = {k}"),
            });
            clauses.push(sampling_clause("-L† is rEEP (sampling)", &neg_pinv)?);
            let sym = symmetric_part(&bundle.pinv);
            let sym_cut = DEFAULT_ZERO_TOL * frobenius_norm(&sym);
            clauses.push(psd_clause(
                "(L†)_s is psd of corank 1",
                &sym,
                sym_cut,
            )?);
        }
    }

    let conclusive: Vec<bool> = clauses.iter().filter_map(|c| c.value).collect();
    let agreement = conclusive.windows(2).all(|w| w[0] == w[1]);
    Ok(EquivalenceAudit {
        class,
        clauses,
        agreement,
    })
}

fn sampling_clause(label: &str, m: &CMatrix) -> Result<AuditClause, ReepError> {
    let cert = reep_by_sampling_auto(m)?;
    let value = match cert.verdict {
        Verdict::Reep => Some(true),
        Verdict::NotReep => Some(false),
        Verdict::Inconclusive => None,
    };
    Ok(AuditClause {
        label: label.into(),
        value,
        detail: cert
            .witness
            .unwrap_or_else(|| format!("t0 = {:?}", cert.t0_estimate)),
    })
}

fn psd_clause(label: &str, m: &CMatrix, cut: f64) -> Result<AuditClause, ReepError> {
    let dec = eig(m)?;
    let value = psd_corank1_of_spectrum(&dec.eigenvalues, cut);
    Ok(AuditClause {
        label: label.into(),
        value: Some(value),
        detail: if value {
            "holds".into()
        } else {
            psd_witness(&dec.eigenvalues, cut)
        },
    })
}

/// Preferred certificate for `−L`: the class-conditional criterion when it
/// applies, then the shifted-PF certificate, then sampling.
pub fn certify(bundle: &LaplacianBundle) -> Result<ReepCertificate, ReepError> {
    let spectral = reep_by_spectrum(bundle);
    if spectral.verdict != Verdict::Inconclusive {
        return Ok(spectral);
    }
    let neg_l = bundle.laplacian.mapv(|z| -z);
    let shifted = reep_by_shifted_pf(&neg_l)?;
    if shifted.verdict == Verdict::Reep {
        return Ok(shifted);
    }
    reep_by_sampling_auto(&neg_l)
}

/// Preferred certificate for `−L†`.
pub fn certify_pinv(bundle: &LaplacianBundle) -> Result<ReepCertificate, ReepError> {
    let spectral = reep_pinv_by_spectrum(bundle)?;
    if spectral.verdict != Verdict::Inconclusive {
        return Ok(spectral);
    }
    let neg = bundle.pinv.mapv(|z| -z);
    let shifted = reep_by_shifted_pf(&neg)?;
    if shifted.verdict == Verdict::Reep {
        return Ok(shifted);
    }
    reep_by_sampling_auto(&neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::ComplexGraph;
    use crate::numkernel::c;
    use crate::spectral::LaplacianBundle;
    use ndarray::array;

    fn r(x: f64) -> Scalar {
        c(x, 0.0)
    }

    #[test]
    fn strong_pf_all_ones() {
        let m = array![[r(1.0), r(1.0)], [r(1.0), r(1.0)]];
        let report = strong_pf_check(&m).unwrap();
        assert!((report.dominant_eigenvalue.0 - 2.0).abs() < 1e-12);
        assert!(report.is_simple);
        assert!(report.strictly_dominant);
        assert!(report.right_vector_ok);
        assert!(report.in_set_o);
        assert!(report.satisfies_strong_pf());
    }

    #[test]
    fn strong_pf_repeated_dominant() {
        let m = array![[r(1.0), r(0.0)], [r(0.0), r(1.0)]];
        let report = strong_pf_check(&m).unwrap();
        assert!(!report.is_simple);
        assert!(!report.strictly_dominant);
        assert!(!report.satisfies_strong_pf());
    }

    #[test]
    fn strong_pf_shifted_balanced_digraph() {
        // five-node weight-balanced digraph; B = dI − L with d past the
        // shift threshold has its spectral radius at the zero eigenvalue of
        // L with a uniform eigenvector, hence lies in the sufficient set
        let g = ComplexGraph::new(
            5,
            true,
            &[
                (0, 1, c(1.0, 0.1)),
                (1, 2, c(1.0, 0.1)),
                (2, 3, c(1.0, 0.1)),
                (3, 4, c(1.0, 0.1)),
                (4, 0, c(1.0, 0.1)),
                (0, 2, r(0.5)),
                (2, 4, r(0.5)),
                (4, 1, r(0.5)),
                (1, 3, r(0.5)),
                (3, 0, r(0.5)),
            ],
            None,
        )
        .unwrap();
        let bundle = LaplacianBundle::analyze(&g).unwrap();
        let spectrum: Vec<Scalar> = bundle.spectrum.eigenvalues.to_vec();
        let d = shift_d(&spectrum).unwrap();
        let n = bundle.n();
        let mut b = bundle.laplacian.mapv(|z| -z);
        for i in 0..n {
            b[(i, i)] += d;
        }
        let report = strong_pf_check(&b).unwrap();
        assert!(report.satisfies_strong_pf(), "{report:?}");
        assert!(report.in_set_o);
    }

    #[test]
    fn shift_d_examples() {
        let d = shift_d(&[r(0.0), r(2.0)]).unwrap();
        assert!((d - 1.01).abs() < 1e-12);

        let d = shift_d(&[r(0.0), c(1.0, 10.0)]).unwrap();
        assert!((d - 51.005).abs() < 1e-9);

        let spectrum = [
            r(0.0),
            c(3.67, 5.14),
            c(5.0, 5.0),
            c(6.32, -0.14),
            c(7.0, 1.0),
        ];
        let d = shift_d(&spectrum).unwrap();
        let threshold = d / 1.01;
        assert!((threshold - 5.4344).abs() < 1e-3);
        assert!(d < 6.0);
    }

    #[test]
    fn shift_d_rejects_bad_spectra() {
        assert!(matches!(
            shift_d(&[r(0.0), r(0.0), r(1.0)]),
            Err(ReepError::NonsimpleZero { found: 2 })
        ));
        assert!(matches!(
            shift_d(&[r(0.0), r(-1.0)]),
            Err(ReepError::NonpositiveRealPart { .. })
        ));
    }

    #[test]
    fn sampling_positive_two_node() {
        let m = array![[r(-1.0), r(1.0)], [r(1.0), r(-1.0)]]; // -L
        let cert = reep_by_sampling_auto(&m).unwrap();
        assert_eq!(cert.verdict, Verdict::Reep);
        // entries are positive for every t > 0, so the onset is the first
        // grid point
        let t0 = cert.t0_estimate.unwrap();
        assert!(t0 <= default_sampling_horizon(&m).unwrap() / 999.0);
    }

    #[test]
    fn sampling_diverging_two_node() {
        let m = array![[r(1.0), r(-1.0)], [r(-1.0), r(1.0)]]; // -L for weight -1
        let cert = reep_by_sampling_auto(&m).unwrap();
        assert_eq!(cert.verdict, Verdict::NotReep);
        assert!(cert.witness.unwrap().contains("exceeded"));
    }

    #[test]
    fn sampling_complex_weight_two_node() {
        let g = ComplexGraph::new(2, false, &[(0, 1, c(1.0, 1.0))], None).unwrap();
        let bundle = LaplacianBundle::analyze(&g).unwrap();
        let m = bundle.laplacian.mapv(|z| -z);
        let cert = reep_by_sampling_auto(&m).unwrap();
        assert_eq!(cert.verdict, Verdict::Reep);
    }

    #[test]
    fn sampling_rejects_small_grids() {
        let m = array![[r(-1.0)]];
        assert!(matches!(
            reep_by_sampling(&m, 1.0, 8, DEFAULT_EPS_POS),
            Err(ReepError::TooFewSamples(8))
        ));
    }

    #[test]
    fn spectrum_criterion_examples() {
        let g = ComplexGraph::new(2, false, &[(0, 1, r(1.0))], None).unwrap();
        let bundle = LaplacianBundle::analyze(&g).unwrap();
        assert_eq!(reep_by_spectrum(&bundle).verdict, Verdict::Reep);

        let g = ComplexGraph::new(2, false, &[(0, 1, r(-1.0))], None).unwrap();
        let bundle = LaplacianBundle::analyze(&g).unwrap();
        let cert = reep_by_spectrum(&bundle);
        assert_eq!(cert.verdict, Verdict::NotReep);
        assert!(cert.witness.unwrap().contains("right half-plane"));

        let g = ComplexGraph::new(3, true, &[(0, 1, r(1.0)), (1, 2, r(1.0))], None).unwrap();
        let bundle = LaplacianBundle::analyze(&g).unwrap();
        assert_eq!(reep_by_spectrum(&bundle).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn audit_two_node_unit() {
        let g = ComplexGraph::new(2, false, &[(0, 1, r(1.0))], None).unwrap();
        let bundle = LaplacianBundle::analyze(&g).unwrap();
        let audit = equivalence_audit(&bundle).unwrap();
        assert_eq!(audit.class, TheoremClass::UnsignedUndirected);
        assert!(audit.agreement);
        for clause in &audit.clauses {
            assert_eq!(clause.value, Some(true), "{clause:?}");
        }
    }

    #[test]
    fn audit_two_node_negative() {
        let g = ComplexGraph::new(2, false, &[(0, 1, r(-1.0))], None).unwrap();
        let bundle = LaplacianBundle::analyze(&g).unwrap();
        let audit = equivalence_audit(&bundle).unwrap();
        assert_eq!(audit.class, TheoremClass::SignedUndirected);
        assert!(audit.agreement);
        for clause in &audit.clauses {
            assert_eq!(clause.value, Some(false), "{clause:?}");
        }
    }

    #[test]
    fn audit_three_cycle() {
        let g = ComplexGraph::new(
            3,
            true,
            &[(0, 1, r(1.0)), (1, 2, r(1.0)), (2, 0, r(1.0))],
            None,
        )
        .unwrap();
        let bundle = LaplacianBundle::analyze(&g).unwrap();
        let audit = equivalence_audit(&bundle).unwrap();
        assert_eq!(audit.class, TheoremClass::BalancedUnsignedDigraph);
        assert!(audit.agreement);
        for clause in &audit.clauses {
            assert_eq!(clause.value, Some(true), "{clause:?}");
        }
    }

    #[test]
    fn audit_rejects_uncovered_class() {
        let g = ComplexGraph::new(3, true, &[(0, 1, r(1.0)), (1, 2, r(1.0))], None).unwrap();
        let bundle = LaplacianBundle::analyze(&g).unwrap();
        assert!(matches!(
            equivalence_audit(&bundle),
            Err(ReepError::OutsideTheoremClasses { .. })
        ));
    }

    #[test]
    fn certify_prefers_spectral_then_sampling() {
        let g = ComplexGraph::new(2, false, &[(0, 1, r(1.0))], None).unwrap();
        let bundle = LaplacianBundle::analyze(&g).unwrap();
        let cert = certify(&bundle).unwrap();
        assert_eq!(cert.verdict, Verdict::Reep);
        assert_eq!(cert.criterion, Criterion::SpectralClass);
        let cert = certify_pinv(&bundle).unwrap();
        assert_eq!(cert.verdict, Verdict::Reep);
    }

    #[test]
    fn shifted_pf_certifies_balanced_digraph() {
        let g = ComplexGraph::new(
            3,
            true,
            &[(0, 1, r(1.0)), (1, 2, r(1.0)), (2, 0, r(1.0))],
            None,
        )
        .unwrap();
        let bundle = LaplacianBundle::analyze(&g).unwrap();
        let neg_l = bundle.laplacian.mapv(|z| -z);
        let cert = reep_by_shifted_pf(&neg_l).unwrap();
        assert_eq!(cert.verdict, Verdict::Reep);
        assert_eq!(cert.criterion, Criterion::ShiftedPf);
        assert!(cert.shift_d.unwrap() > 0.0);
    }
}
