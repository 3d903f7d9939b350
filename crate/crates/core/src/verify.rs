//! Executable verification: Perron-entry ordering along the two arms of the
//! central path, pendant-entry equality, monotonicity of the pendant-shift,
//! contraction and branch-move transformations, and exhaustive reproduction
//! of the minimizer families over every (order, diameter) class.
//!
//! Strict inequalities between spectral radii are decided only from disjoint
//! Collatz-Wielandt enclosures. When two enclosures overlap, both sides are
//! re-solved once at `tolerance / 100`; if they still overlap the comparison
//! is reported as indistinguishable instead of being forced either way.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::enumerate::{
    all_trees, canonical_code, decode_labeled_tree, trees_with_diameter, CanonicalCode,
    EnumerateError, TreeCache, TreeClass, MAX_ENUM_ORDER,
};
use crate::exec::{map_collect, with_pool, Parallelism};
use crate::families::{self, FamilyError};
use crate::graph::{Graph, GraphError, GraphJson, VertexPath};
use crate::spectral::{spectral_radius, SolverConfig, SpectralError};

/// Smallest Perron-entry margin accepted as a certified strict inequality.
pub const ENTRY_MARGIN_FLOOR: f64 = 1e-9;

/// Two equal-by-symmetry Perron entries must agree this tightly.
pub const PENDANT_EQUALITY_TOL: f64 = 1e-9;

/// Tolerance division applied on the single automatic refinement re-run.
const REFINE_FACTOR: f64 = 100.0;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("indistinguishable spectral radii after refinement: {detail}")]
    Indistinguishable { detail: String },
    #[error("graph is missing the role label {role:?}")]
    MissingLabel { role: String },
    #[error("invalid parameters: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
}

/// One failed instance, carrying the full witness graph.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub witness_graph: GraphJson,
    pub detail: String,
}

/// Machine-readable outcome of a check or sweep.
///
/// Serialization is deterministic: map keys are sorted, instance data is
/// ordered canonically and the wall-clock time stays out of the JSON so that
/// reruns (at any worker count) produce identical bytes.
#[derive(Debug, Serialize)]
pub struct VerificationReport {
    pub scope: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub instances_checked: usize,
    pub failures: Vec<Failure>,
    pub min_gap: Option<f64>,
    pub seed: Option<u64>,
    pub solver_config: SolverConfig,
    #[serde(skip)]
    pub wall_time_ms: u128,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

struct ReportBuilder {
    scope: String,
    params: BTreeMap<String, serde_json::Value>,
    instances: usize,
    failures: Vec<Failure>,
    min_gap: Option<f64>,
    seed: Option<u64>,
    started: Instant,
}

impl ReportBuilder {
    fn new(scope: &str) -> Self {
        ReportBuilder {
            scope: scope.to_string(),
            params: BTreeMap::new(),
            instances: 0,
            failures: Vec::new(),
            min_gap: None,
            seed: None,
            started: Instant::now(),
        }
    }

    fn param(&mut self, key: &str, value: serde_json::Value) -> &mut Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn record_gap(&mut self, gap: f64) {
        self.min_gap = Some(match self.min_gap {
            Some(g) => g.min(gap),
            None => gap,
        });
    }

    fn fail(&mut self, witness: &Graph, detail: String) {
        self.failures.push(Failure {
            witness_graph: witness.to_json(),
            detail,
        });
    }

    fn finish(self, cfg: &SolverConfig) -> VerificationReport {
        VerificationReport {
            scope: self.scope,
            params: self.params,
            instances_checked: self.instances,
            failures: self.failures,
            min_gap: self.min_gap,
            seed: self.seed,
            solver_config: *cfg,
            wall_time_ms: self.started.elapsed().as_millis(),
        }
    }
}

/// Certified enclosure of a spectral radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoInterval {
    pub rho: f64,
    pub lower: f64,
    pub upper: f64,
}

fn certify(g: &Graph, cfg: &SolverConfig) -> Result<RhoInterval, VerifyError> {
    let r = spectral_radius(&g.distance_matrix()?, cfg)?;
    Ok(RhoInterval {
        rho: r.rho,
        lower: r.lower,
        upper: r.upper,
    })
}

/// Outcome of a certified strict comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrictOutcome {
    /// The enclosures are disjoint; `gap` is their distance.
    Proven { gap: f64 },
    /// Still overlapping after the refinement re-run.
    Unproven { overlap: f64 },
}

/// Certifies `rho(a) > rho(b)` by interval disjointness, refining once.
pub fn certified_gt(
    a: &Graph,
    b: &Graph,
    cfg: &SolverConfig,
) -> Result<StrictOutcome, VerifyError> {
    let ia = certify(a, cfg)?;
    let ib = certify(b, cfg)?;
    if ia.lower > ib.upper {
        return Ok(StrictOutcome::Proven {
            gap: ia.lower - ib.upper,
        });
    }
    let fine = cfg.refined(REFINE_FACTOR);
    let ia = certify(a, &fine)?;
    let ib = certify(b, &fine)?;
    if ia.lower > ib.upper {
        Ok(StrictOutcome::Proven {
            gap: ia.lower - ib.upper,
        })
    } else {
        Ok(StrictOutcome::Unproven {
            overlap: ib.upper - ia.lower,
        })
    }
}

// ---------------------------------------------------------------------------
// Branch sums
// ---------------------------------------------------------------------------

/// Arm and branch sums of a Perron vector relative to a diameter path.
#[derive(Debug, Clone)]
pub struct BranchSums {
    /// Entry sum over the arm at the tail end of the path (`u` arm).
    pub s1: f64,
    /// Entry sum over the arm at the head end of the path (`v` arm).
    pub s2: f64,
    /// Central entry, present when the path has an odd vertex count; it is
    /// excluded from both arms.
    pub center: Option<f64>,
    /// Attachment vertex on the path -> entry sum over its off-path branch
    /// (the attachment vertex itself excluded).
    pub branch_weights: BTreeMap<usize, f64>,
}

impl BranchSums {
    /// Everything accounted for: arms, center and branches.
    pub fn total(&self) -> f64 {
        self.s1 + self.s2 + self.center.unwrap_or(0.0) + self.branch_weights.values().sum::<f64>()
    }
}

/// Splits a Perron vector along a diameter path of a tree. A path on `2k`
/// vertices yields two arms of `k` vertices; a path on `2k + 1` vertices
/// additionally reports the central entry.
pub fn branch_sums(g: &Graph, dpath: &VertexPath, x: &[f64]) -> Result<BranchSums, VerifyError> {
    if !g.is_tree() {
        return Err(GraphError::NotATree.into());
    }
    let dpath = VertexPath::new(g, dpath.vertices().to_vec())?;
    if x.len() != g.order() {
        return Err(SpectralError::DimensionMismatch {
            got: x.len(),
            expected: g.order(),
        }
        .into());
    }
    let verts = dpath.vertices();
    let m = verts.len();
    let k = m / 2;
    let s2: f64 = verts[..k].iter().map(|&v| x[v]).sum();
    let s1: f64 = verts[m - k..].iter().map(|&v| x[v]).sum();
    let center = (m % 2 == 1).then(|| x[verts[k]]);

    let mut on_path = vec![false; g.order()];
    for &v in verts {
        on_path[v] = true;
    }
    let mut branch_weights = BTreeMap::new();
    for &c in verts {
        let mut weight = 0.0;
        let mut found = false;
        let mut stack: Vec<usize> = g
            .neighbors(c)
            .iter()
            .copied()
            .filter(|&w| !on_path[w])
            .collect();
        let mut seen = BTreeSet::new();
        while let Some(w) = stack.pop() {
            if seen.insert(w) {
                found = true;
                weight += x[w];
                for &y in g.neighbors(w) {
                    if y != c && !seen.contains(&y) {
                        stack.push(y);
                    }
                }
            }
        }
        if found {
            branch_weights.insert(c, weight);
        }
    }
    Ok(BranchSums {
        s1,
        s2,
        center,
        branch_weights,
    })
}

/// The labeled central path `v_k .. v_1 (v_0) u_1 .. u_k` of a family-built
/// tree, oriented so that the `u` arm is the tail.
pub fn role_path(g: &Graph, k: usize) -> Result<VertexPath, VerifyError> {
    let mut verts = Vec::with_capacity(2 * k + 1);
    for i in (1..=k).rev() {
        verts.push(role_vertex(g, &format!("v{i}"))?);
    }
    if let Some(v0) = g.label_of("v0") {
        verts.push(v0);
    }
    for i in 1..=k {
        verts.push(role_vertex(g, &format!("u{i}"))?);
    }
    Ok(VertexPath::new(g, verts)?)
}

fn role_vertex(g: &Graph, role: &str) -> Result<usize, VerifyError> {
    g.label_of(role).ok_or_else(|| VerifyError::MissingLabel {
        role: role.to_string(),
    })
}

fn role_entry(g: &Graph, x: &[f64], role: &str) -> Result<f64, VerifyError> {
    Ok(x[role_vertex(g, role)?])
}

// ---------------------------------------------------------------------------
// Entry-ordering checks along the two arms
// ---------------------------------------------------------------------------

/// Minimal adjacent difference over the alternating chain
/// `x_v1 < x_u1 < x_v2 < x_u2 < ... < x_vk < x_uk`. Non-positive means the
/// ordering is violated somewhere.
pub fn interlacing_margin(g: &Graph, k: usize, x: &[f64]) -> Result<f64, VerifyError> {
    if k < 2 {
        return Err(VerifyError::BadParameters(
            "arm ordering needs k >= 2".into(),
        ));
    }
    let mut chain = Vec::with_capacity(2 * k);
    for i in 1..=k {
        chain.push(role_entry(g, x, &format!("v{i}"))?);
        chain.push(role_entry(g, x, &format!("u{i}"))?);
    }
    Ok(chain
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min))
}

/// Runs the arm-ordering check on one labeled instance, refining once if the
/// margin is not clearly positive.
fn interlacing_instance(
    g: &Graph,
    k: usize,
    cfg: &SolverConfig,
) -> Result<Result<f64, String>, VerifyError> {
    let x = spectral_radius(&g.distance_matrix()?, cfg)?.perron;
    let mut margin = interlacing_margin(g, k, &x)?;
    if margin <= ENTRY_MARGIN_FLOOR {
        let x = spectral_radius(&g.distance_matrix()?, &cfg.refined(REFINE_FACTOR))?.perron;
        margin = interlacing_margin(g, k, &x)?;
    }
    if margin > ENTRY_MARGIN_FLOOR {
        Ok(Ok(margin))
    } else {
        Ok(Err(format!(
            "arm ordering chain not certified: margin {margin:.3e}"
        )))
    }
}

/// Arm-ordering check on the odd-diameter family member of order `n` with
/// half-diameter `k` (needs at least one pendant so the hub is nontrivial).
pub fn check_lemma_2_3(
    n: usize,
    k: usize,
    cfg: &SolverConfig,
) -> Result<VerificationReport, VerifyError> {
    if k < 2 || n < 2 * k + 1 {
        return Err(VerifyError::BadParameters(format!(
            "arm-ordering instances need k >= 2 and n >= 2k + 1, got n={n}, k={k}"
        )));
    }
    let g = families::t1(n, k)?;
    let mut rb = ReportBuilder::new("lemma2.3");
    rb.param("n", json!(n)).param("k", json!(k));
    rb.instances = 1;
    match interlacing_instance(&g, k, cfg)? {
        Ok(margin) => rb.record_gap(margin),
        Err(detail) => rb.fail(&g, detail),
    }
    Ok(rb.finish(cfg))
}

/// A hub-and-two-arms instance whose hub is a star: two pendant paths of
/// `k` and `k - 1` vertices rooted at the junction, which is either the star
/// center or one of its leaves.
pub fn star_hub_instance(
    k: usize,
    star_size: usize,
    attach_at_leaf: bool,
) -> Result<Graph, VerifyError> {
    if k < 2 || star_size < 1 {
        return Err(VerifyError::BadParameters(format!(
            "star hub instances need k >= 2 and star_size >= 1, got k={k}, star_size={star_size}"
        )));
    }
    let hub = families::star(star_size + 1)?;
    let junction = if attach_at_leaf { 1 } else { 0 };
    let mut g = families::attach_pendant_paths(&hub, junction, k, k - 1)?;
    let base = star_size + 1;
    g.set_label("v1", junction);
    for i in 1..=k {
        g.set_label(format!("u{i}"), base + i - 1);
    }
    for i in 2..=k {
        g.set_label(format!("v{i}"), base + k + i - 2);
    }
    Ok(g)
}

/// Full arm-ordering sweep: the family grid `k = 2..=8`,
/// `n = 2k+1 ..= 2k+12`, plus fifty star-hub instances.
pub fn lemma_2_3_sweep(
    cfg: &SolverConfig,
    pll: Parallelism,
) -> Result<VerificationReport, VerifyError> {
    with_pool(pll, || {
        let mut instances: Vec<(Graph, usize)> = Vec::new();
        for k in 2..=8 {
            for n in 2 * k + 1..=2 * k + 12 {
                instances.push((families::t1(n, k)?, k));
            }
        }
        for k in 2..=6 {
            for star_size in 1..=5 {
                for attach_at_leaf in [false, true] {
                    instances.push((star_hub_instance(k, star_size, attach_at_leaf)?, k));
                }
            }
        }
        let outcomes = map_collect(&instances, pll, |(g, k)| interlacing_instance(g, *k, cfg));
        let mut rb = ReportBuilder::new("lemma2.3");
        rb.param("t1_grid", json!("k=2..8, n=2k+1..2k+12"))
            .param("star_hub_instances", json!(50));
        rb.instances = instances.len();
        for ((g, _), outcome) in instances.iter().zip(outcomes) {
            match outcome? {
                Ok(margin) => rb.record_gap(margin),
                Err(detail) => rb.fail(g, detail),
            }
        }
        Ok(rb.finish(cfg))
    })
}

// ---------------------------------------------------------------------------
// Pendant-entry equality and the hub inequality
// ---------------------------------------------------------------------------

/// On the odd-diameter family member: all pendant entries agree, and
/// `x_v1 + ceil((n-2k)/2) * x_vn > x_uk` with a certified margin.
pub fn check_lemma_2_4(
    n: usize,
    k: usize,
    cfg: &SolverConfig,
) -> Result<VerificationReport, VerifyError> {
    if k < 2 || n < 2 * k + 1 {
        return Err(VerifyError::BadParameters(format!(
            "pendant checks need k >= 2 and n >= 2k + 1, got n={n}, k={k}"
        )));
    }
    let g = families::t1(n, k)?;
    let mut rb = ReportBuilder::new("lemma2.4");
    rb.param("n", json!(n)).param("k", json!(k));
    rb.instances = 1;
    match lemma_2_4_instance(&g, n, k, cfg)? {
        Ok(margin) => rb.record_gap(margin),
        Err(detail) => rb.fail(&g, detail),
    }
    Ok(rb.finish(cfg))
}

fn lemma_2_4_instance(
    g: &Graph,
    n: usize,
    k: usize,
    cfg: &SolverConfig,
) -> Result<Result<f64, String>, VerifyError> {
    let margin_of = |x: &[f64]| -> Result<(f64, f64), VerifyError> {
        let pendants: Vec<f64> = (2 * k + 1..=n)
            .map(|i| role_entry(g, x, &format!("v{i}")))
            .collect::<Result<_, _>>()?;
        let spread = pendants.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - pendants.iter().cloned().fold(f64::INFINITY, f64::min);
        let weight = (n - 2 * k).div_ceil(2) as f64;
        let margin = role_entry(g, x, "v1")? + weight * role_entry(g, x, &format!("v{n}"))?
            - role_entry(g, x, &format!("u{k}"))?;
        Ok((spread, margin))
    };
    let x = spectral_radius(&g.distance_matrix()?, cfg)?.perron;
    let (spread, mut margin) = margin_of(&x)?;
    if spread > PENDANT_EQUALITY_TOL {
        return Ok(Err(format!(
            "pendant entries differ by {spread:.3e} (allowed {PENDANT_EQUALITY_TOL:.0e})"
        )));
    }
    if margin <= ENTRY_MARGIN_FLOOR {
        let x = spectral_radius(&g.distance_matrix()?, &cfg.refined(REFINE_FACTOR))?.perron;
        margin = margin_of(&x)?.1;
    }
    if margin > ENTRY_MARGIN_FLOOR {
        Ok(Ok(margin))
    } else {
        Ok(Err(format!(
            "hub inequality not certified: margin {margin:.3e}"
        )))
    }
}

/// Pendant-equality sweep over the same family grid as the arm ordering.
pub fn lemma_2_4_sweep(
    cfg: &SolverConfig,
    pll: Parallelism,
) -> Result<VerificationReport, VerifyError> {
    with_pool(pll, || {
        let mut instances: Vec<(Graph, usize, usize)> = Vec::new();
        for k in 2..=8 {
            for n in 2 * k + 1..=2 * k + 12 {
                instances.push((families::t1(n, k)?, n, k));
            }
        }
        let outcomes = map_collect(&instances, pll, |(g, n, k)| {
            lemma_2_4_instance(g, *n, *k, cfg)
        });
        let mut rb = ReportBuilder::new("lemma2.4");
        rb.param("t1_grid", json!("k=2..8, n=2k+1..2k+12"));
        rb.instances = instances.len();
        for ((g, _, _), outcome) in instances.iter().zip(outcomes) {
            match outcome? {
                Ok(margin) => rb.record_gap(margin),
                Err(detail) => rb.fail(g, detail),
            }
        }
        Ok(rb.finish(cfg))
    })
}

// ---------------------------------------------------------------------------
// Pendant-path shift (lemma 2.1) and cut-edge contraction (lemma 2.2)
// ---------------------------------------------------------------------------

/// One pendant-shift comparison: `rho(G(p+1, q-1)) > rho(G(p, q))` for
/// `p >= q >= 1`. Rejects swapped arguments instead of asserting anything.
pub fn check_lemma_2_1_instance(
    base: &Graph,
    w: usize,
    p: usize,
    q: usize,
    cfg: &SolverConfig,
) -> Result<StrictOutcome, VerifyError> {
    if q < 1 || p < q {
        return Err(VerifyError::BadParameters(format!(
            "pendant shift needs p >= q >= 1, got p={p}, q={q}"
        )));
    }
    let before = families::attach_pendant_paths(base, w, p, q)?;
    let after = families::attach_pendant_paths(base, w, p + 1, q - 1)?;
    certified_gt(&after, &before, cfg)
}

/// Seeded random sweep of pendant-shift comparisons on trees of bounded
/// total order.
pub fn check_lemma_2_1(
    seed: u64,
    instances: usize,
    order_cap: usize,
    cfg: &SolverConfig,
    pll: Parallelism,
) -> Result<VerificationReport, VerifyError> {
    if order_cap < 4 {
        return Err(VerifyError::BadParameters(
            "pendant-shift sweep needs order_cap >= 4".into(),
        ));
    }
    with_pool(pll, || {
        let mut pools: Vec<Vec<Graph>> = Vec::new();
        for m in 2..=order_cap - 2 {
            pools.push(all_trees(m)?);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cases: Vec<(Graph, usize, usize, usize)> = Vec::with_capacity(instances);
        while cases.len() < instances {
            let pool = &pools[gen_index(&mut rng, pools.len())];
            let base = pool[gen_index(&mut rng, pool.len())].clone();
            let m = base.order();
            let w = gen_index(&mut rng, m);
            let budget = order_cap - m; // >= 2
            let q = 1 + gen_index(&mut rng, budget / 2);
            let p = q + gen_index(&mut rng, budget - 2 * q + 1);
            cases.push((base, w, p, q));
        }
        let outcomes = map_collect(&cases, pll, |(base, w, p, q)| {
            check_lemma_2_1_instance(base, *w, *p, *q, cfg)
        });
        let mut rb = ReportBuilder::new("lemma2.1");
        rb.param("instances", json!(instances))
            .param("order_cap", json!(order_cap));
        rb.seed = Some(seed);
        rb.instances = instances;
        for ((base, w, p, q), outcome) in cases.iter().zip(outcomes) {
            match outcome? {
                StrictOutcome::Proven { gap } => rb.record_gap(gap),
                StrictOutcome::Unproven { overlap } => rb.fail(
                    base,
                    format!("shift at w={w} from ({p},{q}) not certified, overlap {overlap:.3e}"),
                ),
            }
        }
        Ok(rb.finish(cfg))
    })
}

/// Exhaustive contraction sweep: for every non-pendant edge of every tree up
/// to `n_max`, contracting it strictly lowers the spectral radius.
pub fn check_lemma_2_2(
    n_max: usize,
    cfg: &SolverConfig,
    pll: Parallelism,
) -> Result<VerificationReport, VerifyError> {
    if n_max > MAX_ENUM_ORDER {
        return Err(EnumerateError::OrderTooLarge {
            n: n_max,
            max: MAX_ENUM_ORDER,
        }
        .into());
    }
    with_pool(pll, || {
        let mut cases: Vec<(Graph, usize, usize)> = Vec::new();
        for n in 4..=n_max {
            for g in all_trees(n)? {
                for (u, v) in g.edges() {
                    if g.degree(u) > 1 && g.degree(v) > 1 {
                        cases.push((g.clone(), u, v));
                    }
                }
            }
        }
        let outcomes = map_collect(&cases, pll, |(g, u, v)| -> Result<_, VerifyError> {
            let contracted = families::contract_cut_edge(g, *u, *v)?;
            certified_gt(g, &contracted, cfg)
        });
        let mut rb = ReportBuilder::new("lemma2.2");
        rb.param("n_max", json!(n_max));
        rb.instances = cases.len();
        for ((g, u, v), outcome) in cases.iter().zip(outcomes) {
            match outcome? {
                StrictOutcome::Proven { gap } => rb.record_gap(gap),
                StrictOutcome::Unproven { overlap } => rb.fail(
                    g,
                    format!("contraction of ({u},{v}) not certified, overlap {overlap:.3e}"),
                ),
            }
        }
        Ok(rb.finish(cfg))
    })
}

// ---------------------------------------------------------------------------
// Branch move (lemma 3.1)
// ---------------------------------------------------------------------------

/// A split of a connected graph at a junction vertex into three parts, each
/// given by its vertex set without the junction.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub v0: usize,
    pub g1: BTreeSet<usize>,
    pub g2: BTreeSet<usize>,
    pub g3: BTreeSet<usize>,
}

impl Decomposition {
    fn validate(&self, g: &Graph) -> Result<(), VerifyError> {
        let n = g.order();
        if self.v0 >= n {
            return Err(GraphError::VertexOutOfRange { v: self.v0, n }.into());
        }
        for part in [&self.g1, &self.g2, &self.g3] {
            if part.is_empty() {
                return Err(FamilyError::InvalidDecomposition(
                    "every part must be nontrivial".into(),
                )
                .into());
            }
            if part.contains(&self.v0) {
                return Err(FamilyError::InvalidDecomposition(
                    "parts must not contain the junction vertex".into(),
                )
                .into());
            }
        }
        let mut seen = BTreeSet::new();
        for part in [&self.g1, &self.g2, &self.g3] {
            for &v in part {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { v, n }.into());
                }
                if !seen.insert(v) {
                    return Err(FamilyError::InvalidDecomposition(format!(
                        "vertex {v} appears in two parts"
                    ))
                    .into());
                }
            }
        }
        if seen.len() != n - 1 {
            return Err(FamilyError::InvalidDecomposition(
                "parts must cover every vertex besides the junction".into(),
            )
            .into());
        }
        // parts may only meet at the junction
        for (a, b) in g.edges() {
            if a == self.v0 || b == self.v0 {
                continue;
            }
            let part_of = |v: usize| -> u8 {
                if self.g1.contains(&v) {
                    1
                } else if self.g2.contains(&v) {
                    2
                } else {
                    3
                }
            };
            if part_of(a) != part_of(b) {
                return Err(FamilyError::InvalidDecomposition(format!(
                    "edge ({a},{b}) crosses two parts away from the junction"
                ))
                .into());
            }
        }
        Ok(())
    }
}

/// Branch-move check: with `S1 >= S2` (arm sums of the Perron vector over the
/// first two parts), moving the third part from the junction to a vertex of
/// the second part strictly raises the spectral radius. When the sum
/// precondition fails the instance is recorded as skipped, not asserted.
pub fn check_lemma_3_1(
    g: &Graph,
    dec: &Decomposition,
    va: usize,
    cfg: &SolverConfig,
) -> Result<VerificationReport, VerifyError> {
    dec.validate(g)?;
    if !dec.g2.contains(&va) {
        return Err(FamilyError::InvalidDecomposition(
            "the reattachment target must lie in the second part".into(),
        )
        .into());
    }
    let x = spectral_radius(&g.distance_matrix()?, cfg)?.perron;
    let s1 = x[dec.v0] + dec.g1.iter().map(|&v| x[v]).sum::<f64>();
    let s2 = x[dec.v0] + dec.g2.iter().map(|&v| x[v]).sum::<f64>();
    let mut rb = ReportBuilder::new("lemma3.1");
    rb.param("v0", json!(dec.v0))
        .param("va", json!(va))
        .param("s1", json!(s1))
        .param("s2", json!(s2))
        .param("precondition_met", json!(s1 >= s2));
    rb.instances = 1;
    if s1 < s2 {
        return Ok(rb.finish(cfg));
    }
    let moved = families::reattach_branch(g, dec.v0, va, &dec.g3)?;
    match certified_gt(&moved, g, cfg)? {
        StrictOutcome::Proven { gap } => rb.record_gap(gap),
        StrictOutcome::Unproven { overlap } => rb.fail(
            g,
            format!("branch move did not certifiably increase rho, overlap {overlap:.3e}"),
        ),
    }
    Ok(rb.finish(cfg))
}

/// Seeded sweep of branch moves over random trees: every generated instance
/// satisfies the sum precondition by construction.
pub fn lemma_3_1_sweep(
    seed: u64,
    instances: usize,
    n_max: usize,
    cfg: &SolverConfig,
    pll: Parallelism,
) -> Result<VerificationReport, VerifyError> {
    if !(5..=MAX_ENUM_ORDER).contains(&n_max) {
        return Err(VerifyError::BadParameters(format!(
            "branch-move sweep needs 5 <= n_max <= {MAX_ENUM_ORDER}, got {n_max}"
        )));
    }
    with_pool(pll, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cases: Vec<(Graph, Decomposition, usize)> = Vec::with_capacity(instances);
        while cases.len() < instances {
            let n = 5 + gen_index(&mut rng, n_max - 4);
            let seq: Vec<usize> = (0..n - 2).map(|_| gen_index(&mut rng, n)).collect();
            let g = decode_labeled_tree(&seq, n);
            let hubs: Vec<usize> = (0..n).filter(|&v| g.degree(v) >= 3).collect();
            if hubs.is_empty() {
                continue;
            }
            let v0 = hubs[gen_index(&mut rng, hubs.len())];
            let groups = branch_groups(&g, v0);
            let moved_idx = gen_index(&mut rng, groups.len());
            let x = spectral_radius(&g.distance_matrix()?, cfg)?.perron;
            // the lightest remaining group becomes the target part, so the
            // precondition holds by construction
            let (target_idx, _) = groups
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != moved_idx)
                .map(|(i, grp)| (i, grp.iter().map(|&v| x[v]).sum::<f64>()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .expect("degree >= 3 leaves at least two groups");
            let g2: BTreeSet<usize> = groups[target_idx].iter().copied().collect();
            let g3: BTreeSet<usize> = groups[moved_idx].iter().copied().collect();
            let g1: BTreeSet<usize> = groups
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != moved_idx && i != target_idx)
                .flat_map(|(_, grp)| grp.iter().copied())
                .collect();
            let va_pool: Vec<usize> = g2.iter().copied().collect();
            let va = va_pool[gen_index(&mut rng, va_pool.len())];
            cases.push((g, Decomposition { v0, g1, g2, g3 }, va));
        }
        let outcomes = map_collect(&cases, pll, |(g, dec, va)| {
            check_lemma_3_1(g, dec, *va, cfg)
        });
        let mut rb = ReportBuilder::new("lemma3.1");
        rb.param("instances", json!(instances))
            .param("n_max", json!(n_max));
        rb.seed = Some(seed);
        rb.instances = instances;
        for ((g, _, _), outcome) in cases.iter().zip(outcomes) {
            let inner = outcome?;
            match inner.min_gap {
                Some(gap) if inner.passed() => rb.record_gap(gap),
                _ if inner.passed() => {
                    // precondition unmet never happens for generated cases
                    rb.fail(g, "generated instance missed the sum precondition".into());
                }
                _ => {
                    for f in inner.failures {
                        rb.failures.push(f);
                    }
                }
            }
        }
        Ok(rb.finish(cfg))
    })
}

/// Vertex groups of the branches hanging at `v0`.
fn branch_groups(g: &Graph, v0: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.order()];
    seen[v0] = true;
    let mut groups = Vec::new();
    for &start in g.neighbors(v0) {
        if seen[start] {
            continue;
        }
        let mut group = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            group.push(v);
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        group.sort_unstable();
        groups.push(group);
    }
    groups
}

fn gen_index(rng: &mut ChaCha8Rng, bound: usize) -> usize {
    debug_assert!(bound > 0);
    (rng.next_u64() % bound as u64) as usize
}

// ---------------------------------------------------------------------------
// Exhaustive minimizer reproduction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Scored {
    index: usize,
    code: CanonicalCode,
    interval: RhoInterval,
}

#[derive(Debug)]
struct ClassOutcome {
    class_size: usize,
    winner: Graph,
    winner_code: CanonicalCode,
    winner_interval: RhoInterval,
    runner_up: Option<RhoInterval>,
    /// Certified distance between the winner and runner-up enclosures.
    gap: Option<f64>,
    matches_expected: bool,
}

fn score_class(
    class: &TreeClass,
    cfg: &SolverConfig,
    pll: Parallelism,
) -> Result<ClassOutcome, VerifyError> {
    let score = |cfg: &SolverConfig| -> Result<Vec<Scored>, VerifyError> {
        let results = map_collect(&class.members, pll, |g| -> Result<_, VerifyError> {
            Ok((canonical_code(g)?, certify(g, cfg)?))
        });
        let mut scored = Vec::with_capacity(results.len());
        for (index, r) in results.into_iter().enumerate() {
            let (code, interval) = r?;
            scored.push(Scored {
                index,
                code,
                interval,
            });
        }
        Ok(scored)
    };
    let candidates = |scored: &[Scored]| -> Vec<usize> {
        let best = scored
            .iter()
            .min_by(|a, b| {
                a.interval
                    .upper
                    .partial_cmp(&b.interval.upper)
                    .unwrap()
                    .then_with(|| a.code.cmp(&b.code))
            })
            .expect("classes are non-empty");
        scored
            .iter()
            .filter(|s| s.interval.lower <= best.interval.upper)
            .map(|s| s.index)
            .collect()
    };

    let mut scored = score(cfg)?;
    let mut ambiguous = candidates(&scored);
    if ambiguous.len() > 1 {
        scored = score(&cfg.refined(REFINE_FACTOR))?;
        ambiguous = candidates(&scored);
        if ambiguous.len() > 1 {
            let codes: Vec<String> = ambiguous
                .iter()
                .map(|&i| scored[i].code.as_str().to_string())
                .collect();
            return Err(VerifyError::Indistinguishable {
                detail: format!(
                    "(n={}, d={}) minimum is shared by overlapping enclosures: {codes:?}",
                    class.n, class.d
                ),
            });
        }
    }
    let winner = &scored[ambiguous[0]];
    let expected = families::extremal_tree(class.n, class.d)?;
    let expected_code = canonical_code(&expected)?;
    let runner_up = scored
        .iter()
        .filter(|s| s.index != winner.index)
        .min_by(|a, b| {
            a.interval
                .upper
                .partial_cmp(&b.interval.upper)
                .unwrap()
                .then_with(|| a.code.cmp(&b.code))
        });
    Ok(ClassOutcome {
        class_size: class.members.len(),
        winner: class.members[winner.index].clone(),
        winner_code: winner.code.clone(),
        winner_interval: winner.interval,
        runner_up: runner_up.map(|r| r.interval),
        gap: runner_up.map(|r| r.interval.lower - winner.interval.upper),
        matches_expected: winner.code == expected_code,
    })
}

fn load_class(n: usize, d: usize, cache: Option<&TreeCache>) -> Result<TreeClass, EnumerateError> {
    match cache {
        Some(c) => c.class(n, d),
        None => trees_with_diameter(n, d),
    }
}

/// Exhaustively scores the (order, diameter) class and checks that the
/// unique certified minimizer is the expected family member.
pub fn minimizer(
    n: usize,
    d: usize,
    cache: Option<&TreeCache>,
    cfg: &SolverConfig,
    pll: Parallelism,
) -> Result<(Vec<Graph>, VerificationReport), VerifyError> {
    with_pool(pll, || {
        let class = load_class(n, d, cache)?;
        let outcome = score_class(&class, cfg, pll)?;
        let mut rb = ReportBuilder::new("minimizer");
        rb.param("n", json!(n))
            .param("d", json!(d))
            .param("class_size", json!(outcome.class_size));
        rb.instances = outcome.class_size;
        if let Some(gap) = outcome.gap {
            rb.record_gap(gap);
        }
        if !outcome.matches_expected {
            rb.fail(
                &outcome.winner,
                format!(
                    "minimizer {} is not the expected family member",
                    outcome.winner_code
                ),
            );
        }
        let winner = outcome.winner.clone();
        Ok((vec![winner], rb.finish(cfg)))
    })
}

/// Per-class row of a sweep, as exported to CSV.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremCase {
    pub n: usize,
    pub d: usize,
    pub class_size: usize,
    pub min_rho: f64,
    pub runner_up_rho: Option<f64>,
    pub gap: Option<f64>,
    pub minimizer_code: String,
    pub matches_expected: bool,
}

/// Outcome of the full minimizer sweep.
#[derive(Debug)]
pub struct TheoremSweep {
    pub cases: Vec<TheoremCase>,
    pub report: VerificationReport,
}

impl TheoremSweep {
    /// One row per (order, diameter) class.
    pub fn to_csv(&self) -> String {
        theorem_csv(&self.cases)
    }
}

/// CSV summary with one row per (order, diameter) class.
pub fn theorem_csv(cases: &[TheoremCase]) -> String {
    let mut out = String::from("n,d,class_size,min_rho,runner_up_rho,gap,minimizer_code\n");
    for c in cases {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.n,
            c.d,
            c.class_size,
            c.min_rho,
            opt(c.runner_up_rho),
            opt(c.gap),
            c.minimizer_code
        ));
    }
    out
}

/// Runs the minimizer over every feasible (order, diameter) class with
/// `4 <= n <= n_max` and `2 <= d <= n - 1`.
pub fn theorem_sweep(
    n_max: usize,
    cache: Option<&TreeCache>,
    cfg: &SolverConfig,
    pll: Parallelism,
) -> Result<TheoremSweep, VerifyError> {
    if !(4..=MAX_ENUM_ORDER).contains(&n_max) {
        return Err(VerifyError::BadParameters(format!(
            "sweep needs 4 <= n_max <= {MAX_ENUM_ORDER}, got {n_max}"
        )));
    }
    with_pool(pll, || {
        let mut rb = ReportBuilder::new("theorem");
        rb.param("n_max", json!(n_max));
        let mut cases = Vec::new();
        for n in 4..=n_max {
            for d in 2..n {
                let class = load_class(n, d, cache)?;
                let outcome = score_class(&class, cfg, pll)?;
                rb.instances += outcome.class_size;
                if let Some(gap) = outcome.gap {
                    rb.record_gap(gap);
                }
                if !outcome.matches_expected {
                    rb.fail(
                        &outcome.winner,
                        format!(
                            "(n={n}, d={d}): minimizer {} is not the expected family member",
                            outcome.winner_code
                        ),
                    );
                }
                cases.push(TheoremCase {
                    n,
                    d,
                    class_size: outcome.class_size,
                    min_rho: outcome.winner_interval.rho,
                    runner_up_rho: outcome.runner_up.map(|r| r.rho),
                    gap: outcome.gap,
                    minimizer_code: outcome.winner_code.as_str().to_string(),
                    matches_expected: outcome.matches_expected,
                });
            }
        }
        Ok(TheoremSweep {
            cases,
            report: rb.finish(cfg),
        })
    })
}
