//! Identity suite over the exact field or at random numeric points.
//!
//! Every check lives in [`registry`] as a name, a one-line statement and a
//! function over a prepared [`Context`]; the runner evaluates the whole list
//! in parallel and never stops at the first failure.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::random_admissible_point;
use crate::error::{Error, Result};
use crate::indexing::BinaryIndex;
use crate::matrix::{ColumnVector, SquareMatrix};
use crate::monodromy::{self as mono, Basis, LoopWord};
use crate::params::ParameterPoint;
use crate::scalars::{ExactScalar, Generators, PairedScalar, Scalar, DEFAULT_TOL};

pub const MAX_EXACT_M: usize = 3;
pub const MAX_NUMERIC_M: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backing {
    Exact,
    Numeric,
}

impl fmt::Display for Backing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backing::Exact => "exact",
            Backing::Numeric => "numeric",
        })
    }
}

impl FromStr for Backing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backing::Exact),
            "numeric" => Ok(Backing::Numeric),
            _ => Err(Error::Parse(format!("unknown backing '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CheckStatus {
    ExactPass,
    NumericPass { residual: f64 },
    Fail { witness: String },
    NotApplicable { reason: String },
}

impl CheckStatus {
    pub fn is_fail(&self) -> bool {
        matches!(self, CheckStatus::Fail { .. })
    }
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckStatus::ExactPass => f.write_str("exact-pass"),
            CheckStatus::NumericPass { residual } => write!(f, "numeric-pass({residual:.3e})"),
            CheckStatus::Fail { witness } => write!(f, "fail({witness})"),
            CheckStatus::NotApplicable { reason } => write!(f, "not-applicable({reason})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub identity: String,
    #[serde(flatten)]
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub m: usize,
    pub backing: Backing,
    pub seed: u64,
    /// Numeric sample points; empty for the exact backing.
    pub points: Vec<ParameterPoint>,
    pub mutated: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(|c| c.status.is_fail())
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status.is_fail())
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Fixed-width text table, one row per check.
    pub fn to_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = format!(
            "m = {}, backing = {}, seed = {}{}\n",
            self.m,
            self.backing,
            self.seed,
            if self.mutated { ", mutated" } else { "" }
        );
        for c in &self.checks {
            let time = c.elapsed_ms.map(|t| format!("  {t:.1} ms")).unwrap_or_default();
            out.push_str(&format!("{:<width$}  {}{}\n", c.name, c.status, time));
        }
        let fails = self.failures().count();
        out.push_str(&format!("{} checks, {} failed\n", self.checks.len(), fails));
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    pub m: usize,
    pub backing: Backing,
    pub seed: u64,
    /// Number of random points for the numeric backing.
    pub points: usize,
    /// Relative tolerance for numeric comparisons.
    pub tol: f64,
    /// Flip the sign of v₀ before building M̃₀; some checks must then fail.
    pub mutate: bool,
    pub timings: bool,
}

impl SuiteOptions {
    pub fn new(m: usize, backing: Backing, seed: u64) -> Self {
        SuiteOptions {
            m,
            backing,
            seed,
            points: 4,
            tol: DEFAULT_TOL,
            mutate: false,
            timings: false,
        }
    }
}

/// Matrices shared by all checks at one point (or symbolically).
pub struct Context<S> {
    pub m: usize,
    pub gen: Generators<S>,
    pub plain: Vec<SquareMatrix<S>>,
    pub tilde: Vec<SquareMatrix<S>>,
    pub h: SquareMatrix<S>,
    pub tilde_h: SquareMatrix<S>,
    pub p: SquareMatrix<S>,
    pub v: ColumnVector<S>,
    pub seed: u64,
}

impl<S: Scalar> Context<S> {
    pub fn build(gen: Generators<S>, seed: u64, mutate: bool) -> Result<Self> {
        let m = gen.m();
        let plain = mono::generators(&gen, Basis::Plain)?;
        let mut v = mono::tilde_v(&gen)?;
        if mutate {
            let mut e = v.entries().to_vec();
            e[0] = e[0].neg();
            v = ColumnVector::new(e);
        }
        let mut tilde = vec![SquareMatrix::identity(gen.dim()).sub(&mono::build_n0(&v))];
        for k in 1..=m {
            tilde.push(mono::build_tilde_mk(&gen, k)?);
        }
        Ok(Context {
            m,
            h: mono::build_h(&gen)?,
            tilde_h: mono::build_tilde_h(&gen)?,
            p: mono::build_pm(&gen)?,
            plain,
            tilde,
            v,
            gen,
            seed,
        })
    }

    fn dim(&self) -> usize {
        self.gen.dim()
    }

    fn mats(&self, basis: Basis) -> &[SquareMatrix<S>] {
        match basis {
            Basis::Plain => &self.plain,
            Basis::Tilde => &self.tilde,
        }
    }

    fn form(&self, basis: Basis) -> &SquareMatrix<S> {
        match basis {
            Basis::Plain => &self.h,
            Basis::Tilde => &self.tilde_h,
        }
    }
}

/// Accumulates comparisons for one check: exact mode records the first
/// nonzero difference, numeric mode the worst relative residual.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    residual: f64,
    failure: Option<String>,
    not_applicable: Option<String>,
    tol: f64,
}

impl Tally {
    fn new(tol: f64) -> Self {
        Tally {
            tol,
            ..Default::default()
        }
    }

    fn fail(&mut self, witness: String) {
        if self.failure.is_none() {
            self.failure = Some(witness);
        }
    }

    pub fn error(&mut self, what: &str, e: &Error) {
        self.fail(format!("{what}: {e}"));
    }

    pub fn require(&mut self, what: &str, ok: bool) {
        if !ok {
            self.fail(what.to_string());
        }
    }

    pub fn not_applicable(&mut self, reason: &str) {
        self.not_applicable = Some(reason.to_string());
    }

    pub fn matrices<S: Scalar>(&mut self, what: &str, lhs: &SquareMatrix<S>, rhs: &SquareMatrix<S>) {
        let diff = lhs.sub(rhs);
        if S::EXACT {
            let n = diff.size();
            if let Some(pos) = diff.entries().iter().position(|x| !x.is_zero()) {
                self.fail(format!(
                    "{what}: entry ({}, {}) differs by {}",
                    pos / n,
                    pos % n,
                    shorten(&diff.entries()[pos])
                ));
            }
        } else {
            let scale = lhs.max_residual().max(rhs.max_residual()).max(1.0);
            self.numeric(what, diff.max_residual() / scale);
        }
    }

    pub fn vectors<S: Scalar>(&mut self, what: &str, lhs: &ColumnVector<S>, rhs: &ColumnVector<S>) {
        let diff = lhs.sub(rhs);
        if S::EXACT {
            if let Some(i) = diff.entries().iter().position(|x| !x.is_zero()) {
                self.fail(format!("{what}: entry {i} differs by {}", shorten(diff.get(i))));
            }
        } else {
            let scale = lhs.max_residual().max(rhs.max_residual()).max(1.0);
            self.numeric(what, diff.max_residual() / scale);
        }
    }

    pub fn scalars<S: Scalar>(&mut self, what: &str, lhs: &S, rhs: &S) {
        let diff = lhs.sub(rhs);
        if S::EXACT {
            if !diff.is_zero() {
                self.fail(format!("{what}: differs by {}", shorten(&diff)));
            }
        } else {
            let scale = lhs.residual().max(rhs.residual()).max(1.0);
            self.numeric(what, diff.residual() / scale);
        }
    }

    /// Requires a nonzero scalar (exactly, or above the tolerance).
    pub fn nonzero<S: Scalar>(&mut self, what: &str, x: &S) {
        let ok = if S::EXACT {
            !x.is_zero()
        } else {
            x.residual() > self.tol
        };
        self.require(what, ok);
    }

    fn numeric(&mut self, what: &str, r: f64) {
        if r.is_nan() || r > self.tol {
            self.fail(format!("{what}: relative residual {r:.3e}"));
        }
        self.residual = self.residual.max(r);
    }

    fn merge(&mut self, other: Tally, label: &str) {
        self.residual = self.residual.max(other.residual);
        if let Some(w) = other.failure {
            self.fail(if label.is_empty() { w } else { format!("{w} at {label}") });
        }
        if other.not_applicable.is_some() {
            self.not_applicable = other.not_applicable;
        }
    }

    fn status(self, exact: bool) -> CheckStatus {
        match (self.failure, self.not_applicable) {
            (Some(witness), _) => CheckStatus::Fail { witness },
            (None, Some(reason)) => CheckStatus::NotApplicable { reason },
            (None, None) if exact => CheckStatus::ExactPass,
            (None, None) => CheckStatus::NumericPass {
                residual: self.residual,
            },
        }
    }
}

fn shorten<S: Scalar>(x: &S) -> String {
    let s = x.to_string();
    if s.chars().count() > 120 {
        format!("{}…", s.chars().take(120).collect::<String>())
    } else {
        s
    }
}

type CheckFn<S> = fn(&Context<S>, &mut Tally);

/// A registered identity.
pub struct Check<S> {
    pub name: &'static str,
    pub identity: &'static str,
    pub run: CheckFn<S>,
}

macro_rules! check {
    ($name:expr, $identity:expr, $f:expr) => {
        Check {
            name: $name,
            identity: $identity,
            run: $f,
        }
    };
}

/// Every check, in report order.
pub fn registry<S: Scalar>() -> Vec<Check<S>> {
    vec![
        check!("commutativity-plain", "M_j M_k = M_k M_j for j, k >= 1", |c, t| {
            commutativity(c, t, Basis::Plain)
        }),
        check!("commutativity-tilde", "Mt_j Mt_k = Mt_k Mt_j for j, k >= 1", |c, t| {
            commutativity(c, t, Basis::Tilde)
        }),
        check!("braid-plain", "(M_0 M_k)^2 = (M_k M_0)^2", |c, t| braid(
            c,
            t,
            Basis::Plain
        )),
        check!("braid-tilde", "(Mt_0 Mt_k)^2 = (Mt_k Mt_0)^2", |c, t| braid(
            c,
            t,
            Basis::Tilde
        )),
        check!("invariance-plain", "tM_i H M_i^v = H", |c, t| invariance(
            c,
            t,
            Basis::Plain
        )),
        check!("invariance-tilde", "tMt_i Ht Mt_i^v = Ht", |c, t| invariance(
            c,
            t,
            Basis::Tilde
        )),
        check!("conjugation", "Mt_i = P^-1 M_i P", conjugation),
        check!("congruence", "Ht = tP H P^v", congruence),
        check!("p-recursion", "Q_1 x ... x Q_m equals the block recursion", p_recursion),
        check!("det-p", "det P = prod (1 - g_k)^(2^(m-1))", |c, t| {
            determinant(c, t, &c.p, mono::det_pm_closed(&c.gen))
        }),
        check!("det-h", "det H matches its closed form", |c, t| determinant(
            c,
            t,
            &c.h,
            mono::det_h_closed(&c.gen)
        )),
        check!(
            "det-htilde",
            "det Ht = prod (a - g^I)(b - g^I) / ((a - prod g)(b - 1))^(2^m)",
            |c, t| { determinant(c, t, &c.tilde_h, mono::det_tilde_h_closed(&c.gen)) }
        ),
        check!("det-basis", "det [Mt^I e_v] = prod g_k^(-2^(m-1))", det_basis),
        check!(
            "basis-independence",
            "the vectors Mt_1^i1 ... Mt_m^im e_v are independent",
            basis_independence
        ),
        check!("eigen-ev", "Mt_0 e_v = lambda e_v", eigen_ev),
        check!("rank-one", "rank(Mt_0 - E) = 1", rank_one),
        check!("kernel-v", "ker tv equals the 1-eigenspace of Mt_0", kernel_v),
        check!("kernel-htilde", "ker tv equals {w : tw Ht e_v = 0}", kernel_htilde),
        check!("eigen-ones", "M_0 1 = lambda 1", eigen_ones),
        check!(
            "complement-plain",
            "(M_0 - E) w = 0 whenever t1 H w = 0",
            complement_plain
        ),
        check!(
            "sum-identity",
            "alternating sum over J <= I collapses to a product",
            sum_identity
        ),
        check!("transpose-dual", "H M_i H^-1 = tM_i", transpose_dual),
        check!(
            "n0-image",
            "w - Mt_0 w is a nonzero multiple of e_v when N_0 w != 0",
            n0_image
        ),
        check!(
            "pairing-rank",
            "the pairings tw Ht (Mt^I e_v)^v force w = 0",
            pairing_rank
        ),
        check!(
            "words",
            "word matrices compose anti-homomorphically and cancel inverses",
            words
        ),
    ]
}

fn commutativity<S: Scalar>(c: &Context<S>, t: &mut Tally, basis: Basis) {
    if c.m < 2 {
        return t.not_applicable("needs m >= 2");
    }
    let mats = c.mats(basis);
    for j in 1..=c.m {
        for k in j + 1..=c.m {
            t.matrices(&format!("M_{j} M_{k}"), &mats[j].mul(&mats[k]), &mats[k].mul(&mats[j]));
        }
    }
}

fn braid<S: Scalar>(c: &Context<S>, t: &mut Tally, basis: Basis) {
    if c.m < 2 {
        return t.not_applicable("the relation holds only for m >= 2");
    }
    let mats = c.mats(basis);
    for k in 1..=c.m {
        let a = mats[0].mul(&mats[k]);
        let b = mats[k].mul(&mats[0]);
        t.matrices(&format!("braid k = {k}"), &a.mul(&a), &b.mul(&b));
    }
}

fn invariance<S: Scalar>(c: &Context<S>, t: &mut Tally, basis: Basis) {
    let h = c.form(basis);
    for (i, mi) in c.mats(basis).iter().enumerate() {
        t.matrices(&format!("M_{i}"), &mi.transpose().mul(h).mul(&mi.dualize()), h);
    }
}

fn conjugation<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    match c.p.inverse() {
        Ok(pinv) => {
            for i in 0..=c.m {
                t.matrices(&format!("M_{i}"), &pinv.mul(&c.plain[i]).mul(&c.p), &c.tilde[i]);
            }
        }
        Err(e) => t.error("P^-1", &e),
    }
}

fn congruence<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    t.matrices("Ht", &c.p.transpose().mul(&c.h).mul(&c.p.dualize()), &c.tilde_h);
}

fn p_recursion<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    match mono::build_pm_recursive(&c.gen) {
        Ok(r) => t.matrices("P", &c.p, &r),
        Err(e) => t.error("recursion", &e),
    }
}

fn determinant<S: Scalar>(_: &Context<S>, t: &mut Tally, mat: &SquareMatrix<S>, closed: Result<S>) {
    match closed {
        Ok(want) => t.scalars("det", &mat.determinant(), &want),
        Err(e) => t.error("closed form", &e),
    }
}

fn det_basis<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    match (mono::basis_matrix(&c.gen), mono::basis_det_closed(&c.gen)) {
        (Ok(b), Ok(want)) => t.scalars("det", &b.determinant(), &want),
        (Err(e), _) | (_, Err(e)) => t.error("basis matrix", &e),
    }
}

fn basis_independence<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    match mono::basis_matrix(&c.gen).and_then(|b| b.rank(t.tol)) {
        Ok(r) => t.require(&format!("rank {r} < {}", c.dim()), r == c.dim()),
        Err(e) => t.error("rank", &e),
    }
}

fn eigen_ev<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    match c.gen.lambda() {
        Ok(lambda) => {
            let ev = mono::e_v::<S>(c.dim());
            t.vectors("Mt_0 e_v", &c.tilde[0].mul_vec(&ev), &ev.scale(&lambda));
        }
        Err(e) => t.error("lambda", &e),
    }
}

fn rank_one<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    let n = SquareMatrix::identity(c.dim()).sub(&c.tilde[0]);
    match n.rank(t.tol) {
        Ok(r) => t.require(&format!("rank {r} != 1"), r == 1),
        Err(e) => t.error("rank", &e),
    }
}

fn kernel_v<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    let kernel = mono::rank_one_kernel(&c.v);
    t.require("kernel of tv has dimension 2^m - 1", kernel.len() + 1 == c.dim());
    for (j, w) in kernel.iter().enumerate() {
        t.scalars(&format!("tv w_{j}"), &c.v.dot(w), &S::zero());
        t.vectors(&format!("Mt_0 w_{j}"), &c.tilde[0].mul_vec(w), w);
    }
    if let Ok(r) = SquareMatrix::from_columns(&padded(&kernel, c.dim())).and_then(|k| k.rank(t.tol)) {
        t.require("kernel vectors are independent", r + 1 == c.dim());
    }
    // The 1-eigenspace is no larger: E - Mt_0 has rank 1 only if tv != 0.
    t.require("v is nonzero", !c.v.is_zero());
}

fn padded<S: Scalar>(cols: &[ColumnVector<S>], n: usize) -> Vec<ColumnVector<S>> {
    let mut out = cols.to_vec();
    while out.len() < n {
        out.push(ColumnVector::new(vec![S::zero(); n]));
    }
    out
}

fn kernel_htilde<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    let ev = mono::e_v::<S>(c.dim());
    let hv = c.tilde_h.mul_vec(&ev);
    for (j, w) in mono::rank_one_kernel(&c.v).iter().enumerate() {
        t.scalars(&format!("tw_{j} Ht e_v"), &w.dot(&hv), &S::zero());
    }
    t.nonzero(
        "Ht e_v is nonzero",
        &hv.entries()
            .iter()
            .fold(S::zero(), |acc, x| if acc.is_zero() { x.clone() } else { acc }),
    );
    // Conversely ker tv contains the H-orthogonal complement: v is parallel to Ht e_v.
    let n = c.dim();
    for i in 0..n {
        for j in i + 1..n {
            let minor = c.v.get(i).mul(hv.get(j)).sub(&c.v.get(j).mul(hv.get(i)));
            t.scalars(&format!("minor ({i}, {j}) of [v, Ht e_v]"), &minor, &S::zero());
        }
    }
}

fn eigen_ones<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    match c.gen.lambda() {
        Ok(lambda) => {
            let ones = ColumnVector::<S>::ones(c.dim());
            t.vectors("M_0 1", &c.plain[0].mul_vec(&ones), &ones.scale(&lambda));
        }
        Err(e) => t.error("lambda", &e),
    }
}

fn complement_plain<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    let h1 = c.h.mul_vec(&ColumnVector::ones(c.dim()));
    let defect = c.plain[0].sub(&SquareMatrix::identity(c.dim()));
    for (j, w) in mono::rank_one_kernel(&h1).iter().enumerate() {
        t.vectors(
            &format!("(M_0 - E) w_{j}"),
            &defect.mul_vec(w),
            &ColumnVector::new(vec![S::zero(); c.dim()]),
        );
    }
}

fn sum_identity<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    for index in BinaryIndex::all(c.m) {
        match mono::sum_identity(&c.gen, &index) {
            Ok((lhs, rhs)) => t.scalars(&format!("I = {index}"), &lhs, &rhs),
            Err(e) => t.error(&format!("I = {index}"), &e),
        }
    }
}

fn transpose_dual<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    match c.h.inverse() {
        Ok(hinv) => {
            for (i, mi) in c.plain.iter().enumerate() {
                t.matrices(&format!("M'_{i}"), &c.h.mul(mi).mul(&hinv), &mi.transpose());
            }
        }
        Err(e) => t.error("H^-1", &e),
    }
}

fn random_vector<S: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> ColumnVector<S> {
    ColumnVector::new((0..n).map(|_| S::from_int(rng.gen_range(-5..=5))).collect())
}

fn n0_image<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed ^ 0x5eed_0001);
    let n = c.dim();
    let n0 = mono::build_n0(&c.v);
    let mut tested = 0;
    for _ in 0..64 {
        if tested == 4 {
            break;
        }
        let w = random_vector::<S>(&mut rng, n);
        if n0.mul_vec(&w).is_zero() {
            continue;
        }
        tested += 1;
        let d = w.sub(&c.tilde[0].mul_vec(&w));
        for i in 0..n - 1 {
            t.scalars(&format!("entry {i} of w - Mt_0 w"), d.get(i), &S::zero());
        }
        t.nonzero("mu", d.get(n - 1));
    }
    t.require("found w with N_0 w != 0", tested > 0);
}

fn pairing_rank<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    match mono::basis_matrix(&c.gen) {
        Ok(b) => {
            let gram = c.tilde_h.mul(&b.dualize());
            match gram.rank(t.tol) {
                Ok(r) => t.require(&format!("Gram rank {r} < {}", c.dim()), r == c.dim()),
                Err(e) => t.error("Gram rank", &e),
            }
        }
        Err(e) => t.error("basis matrix", &e),
    }
}

fn words<S: Scalar>(c: &Context<S>, t: &mut Tally) {
    let id = SquareMatrix::identity(c.dim());
    for basis in [Basis::Plain, Basis::Tilde] {
        let mats = c.mats(basis);
        let w = |word: &LoopWord| mono::word_matrix_from(mats, word);
        match w(&LoopWord::empty()) {
            Ok(e) => t.matrices("empty word", &e, &id),
            Err(e) => t.error("empty word", &e),
        }
        for k in 0..=c.m {
            let cancel = LoopWord::from_labels(&[(k, false), (k, true)]);
            match w(&cancel) {
                Ok(e) => t.matrices(&format!("{cancel} ({basis})"), &e, &id),
                Err(e) => t.error(&cancel.to_string(), &e),
            }
            let l = (k + 1) % (c.m + 1);
            let pair = LoopWord::from_labels(&[(k, false), (l, false)]);
            match w(&pair) {
                Ok(e) => t.matrices(&format!("{pair} ({basis})"), &e, &mats[l].mul(&mats[k])),
                Err(e) => t.error(&pair.to_string(), &e),
            }
        }
    }
}

fn run_checks<S: Scalar>(
    contexts: &[(String, std::result::Result<Context<S>, Error>)],
    opts: &SuiteOptions,
) -> Vec<CheckResult> {
    registry::<S>()
        .into_par_iter()
        .map(|check| {
            let start = Instant::now();
            let mut total = Tally::new(opts.tol);
            for (label, ctx) in contexts {
                let mut t = Tally::new(opts.tol);
                match ctx {
                    Ok(ctx) => (check.run)(ctx, &mut t),
                    Err(e) => t.error("building matrices", e),
                }
                total.merge(t, label);
            }
            CheckResult {
                name: check.name.to_string(),
                identity: check.identity.to_string(),
                status: total.status(S::EXACT),
                elapsed_ms: opts.timings.then(|| start.elapsed().as_secs_f64() * 1e3),
            }
        })
        .collect()
}

/// Numeric sample points drawn from `seed`: rationals with denominators ≤ 12,
/// no integer cₖ, and every shifted a^I, b^I at least 1e−6 from ℤ.
pub fn sample_points(m: usize, seed: u64, count: usize) -> Vec<ParameterPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_admissible_point(&mut rng, m, 12, false))
        .collect()
}

pub fn run_suite(opts: &SuiteOptions) -> Result<VerificationReport> {
    let m = opts.m;
    let (checks, points) = match opts.backing {
        Backing::Exact => {
            if m == 0 || m > MAX_EXACT_M {
                return Err(Error::InvalidArgument(format!(
                    "exact suite needs 1 <= m <= {MAX_EXACT_M}"
                )));
            }
            let gen = Generators::<ExactScalar>::symbolic(m)?;
            let ctx = vec![(String::new(), Context::build(gen, opts.seed, opts.mutate))];
            (run_checks(&ctx, opts), Vec::new())
        }
        Backing::Numeric => {
            if m == 0 || m > MAX_NUMERIC_M {
                return Err(Error::InvalidArgument(format!(
                    "numeric suite needs 1 <= m <= {MAX_NUMERIC_M}"
                )));
            }
            if opts.points == 0 {
                return Err(Error::InvalidArgument("need at least one sample point".into()));
            }
            let points = sample_points(m, opts.seed, opts.points);
            let ctx: Vec<_> = points
                .par_iter()
                .enumerate()
                .map(|(i, p)| {
                    let gen = Generators::<PairedScalar>::numeric(p, DEFAULT_TOL);
                    (
                        format!("point {i}"),
                        Context::build(gen, opts.seed.wrapping_add(i as u64), opts.mutate),
                    )
                })
                .collect();
            (run_checks(&ctx, opts), points)
        }
    };
    Ok(VerificationReport {
        m,
        backing: opts.backing,
        seed: opts.seed,
        points,
        mutated: opts.mutate,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_unique() {
        let names: Vec<_> = registry::<ExactScalar>().iter().map(|c| c.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
    }

    #[test]
    fn exact_m1_and_m2() {
        for m in 1..=2 {
            let r = run_suite(&SuiteOptions::new(m, Backing::Exact, 0)).unwrap();
            assert_eq!(r.checks.len(), registry::<ExactScalar>().len());
            for c in &r.checks {
                let ok = matches!(c.status, CheckStatus::ExactPass)
                    || (m == 1 && matches!(c.status, CheckStatus::NotApplicable { .. }));
                assert!(ok, "m = {m}: {} -> {}", c.name, c.status);
            }
        }
    }

    #[test]
    fn numeric_m3() {
        let r = run_suite(&SuiteOptions::new(3, Backing::Numeric, 7)).unwrap();
        assert!(r.passed(), "{}", r.to_table());
        assert!(r
            .checks
            .iter()
            .all(|c| matches!(c.status, CheckStatus::NumericPass { .. })));
    }

    #[test]
    fn mutation_is_caught() {
        for backing in [Backing::Exact, Backing::Numeric] {
            let mut opts = SuiteOptions::new(2, backing, 3);
            opts.mutate = true;
            let r = run_suite(&opts).unwrap();
            assert!(!r.passed());
            for name in ["invariance-tilde", "conjugation", "kernel-htilde"] {
                assert!(r.check(name).unwrap().status.is_fail(), "{backing} {name}");
            }
            assert!(!r.check("commutativity-plain").unwrap().status.is_fail());
        }
    }

    #[test]
    fn deterministic_json() {
        let opts = SuiteOptions::new(2, Backing::Numeric, 11);
        let a = serde_json::to_string(&run_suite(&opts).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(&opts).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("elapsed_ms"));
    }

    #[test]
    fn rejects_out_of_range_m() {
        assert!(run_suite(&SuiteOptions::new(4, Backing::Exact, 0)).is_err());
        assert!(run_suite(&SuiteOptions::new(6, Backing::Numeric, 0)).is_err());
        assert!(run_suite(&SuiteOptions::new(0, Backing::Numeric, 0)).is_err());
    }

    #[test]
    fn braid_fails_at_m1() {
        let gen = Generators::<ExactScalar>::symbolic(1).unwrap();
        let ctx = Context::build(gen, 0, false).unwrap();
        let a = ctx.plain[0].mul(&ctx.plain[1]);
        let b = ctx.plain[1].mul(&ctx.plain[0]);
        let mut t = Tally::new(0.0);
        t.matrices("braid", &a.mul(&a), &b.mul(&b));
        assert!(t.status(true).is_fail());
    }
}
