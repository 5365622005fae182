//! Brute-force Jacobi-closure search over mu-sequences in a prime field.
//!
//! A branch is a prefix `mu_3..mu_w`; extending it by a candidate value for
//! `mu_{w+1}` adds the structure-constant anti-diagonal `i + j = w + 3` and
//! is admissible exactly when every Jacobi triple of total weight `w + 3`
//! has zero residual (lower shells are untouched by the new value, so under
//! depth-first induction the whole window `i + j + k <= w + 3` stays clean).
//! [`extend_one_step_rederived`] is the literal per-candidate re-derivation
//! oracle backing the incremental version; the two are cross-checked in the
//! test suite.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::constructions::{l_lambda, q_algebra};
use crate::scalar::{modp, FieldDescriptor, FieldError, Scalar};
use crate::table::Type2Table;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("seed at weight {index} is outside the explorable range 3..={max}")]
    BadSeed { index: usize, max: usize },
    #[error("prefix is already inconsistent: no value admissible at weight {died_at}")]
    PrefixInconsistent { died_at: usize },
    #[error("the q+1 branch needs q = p^s > 3; q = 3 belongs to the characteristic-3 family")]
    QTooSmall,
    #[error("bound {bound} is too small for this verification (need at least {need})")]
    VerificationBound { bound: usize, need: usize },
    #[error(transparent)]
    Construction(#[from] crate::constructions::ConstructionError),
}

/// Which value of `mu_3` to explore. A nonzero `[e_3 e_2]` can always be
/// rescaled to 1, so the nonzero orbit is represented by `mu_3 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchFilter {
    E3Zero,
    E3Nonzero,
    All,
}

impl BranchFilter {
    pub fn label(&self) -> &'static str {
        match self {
            BranchFilter::E3Zero => "e3-zero",
            BranchFilter::E3Nonzero => "e3-nonzero",
            BranchFilter::All => "all",
        }
    }

    fn mu3_values(&self) -> &'static [u64] {
        match self {
            BranchFilter::E3Zero => &[0],
            BranchFilter::E3Nonzero => &[1],
            BranchFilter::All => &[0, 1],
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub p: u64,
    pub bound: usize,
    pub branch: BranchFilter,
    /// Additional pinned values `(weight, residue)`, e.g. a presentation's
    /// defining relations.
    pub seeds: Vec<(usize, u64)>,
    /// Abort after this many expanded nodes (0 = unlimited).
    pub max_nodes: u64,
    /// Worker threads; 0 uses the default pool, 1 runs sequentially.
    pub jobs: usize,
}

impl ClassifyOptions {
    pub fn new(p: u64, bound: usize, branch: BranchFilter) -> Self {
        ClassifyOptions { p, bound, branch, seeds: Vec::new(), max_nodes: 50_000_000, jobs: 1 }
    }
}

/// A branch that reached the weight bound with every Jacobi shell clean.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurvivorRecord {
    /// The full mu-sequence `mu_3..mu_{bound-2}` as residues.
    pub mu: Vec<u64>,
    /// First-constituent length `n + 1`, `None` when mu vanishes identically.
    pub first_constituent: Option<usize>,
    /// Exact mu-pattern match against a named algebra, if any.
    pub recognized: Option<String>,
}

/// A branch killed by the Jacobi shells, with its death certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeadBranch {
    pub prefix: Vec<u64>,
    /// The weight that admitted no value.
    pub died_at: usize,
    /// Failing triple for the smallest rejected candidate at that weight.
    pub witness: (usize, usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    pub p: u64,
    pub bound: usize,
    pub branch: BranchFilter,
    pub survivors: Vec<SurvivorRecord>,
    pub dead: Vec<DeadBranch>,
    pub nodes_expanded: u64,
    /// False when the node budget stopped the search.
    pub complete: bool,
    /// Open prefixes left unexpanded by the node budget.
    pub frontier: Vec<Vec<u64>>,
}

impl ClassificationReport {
    /// Sorted distinct first-constituent lengths among survivors; `None`
    /// stands for the all-zero branch.
    pub fn first_constituent_lengths(&self) -> Vec<Option<usize>> {
        let mut lengths: Vec<Option<usize>> =
            self.survivors.iter().map(|s| s.first_constituent).collect();
        lengths.sort();
        lengths.dedup();
        lengths
    }
}

/// Incremental search state over `F_p` residues.
#[derive(Debug, Clone)]
struct SearchState {
    p: u64,
    /// `mu[k]` is the residue at weight `3 + k`.
    mu: Vec<u64>,
    /// `diags[s]` holds `gamma(i, s - i)` for `s/2 + 1 <= i <= s - 2`
    /// (the stored orientation `i > j >= 2`), valid for `5 <= s <= w + 2`.
    diags: Vec<Vec<u64>>,
}

fn diag_start(s: usize) -> usize {
    s / 2 + 1
}

impl SearchState {
    fn new(p: u64) -> SearchState {
        SearchState { p, mu: Vec::new(), diags: vec![Vec::new(); 5] }
    }

    /// Highest weight whose mu is chosen.
    fn weight(&self) -> usize {
        self.mu.len() + 2
    }

    fn next_index(&self) -> usize {
        self.weight() + 1
    }

    /// Total structure-constant lookup, with `new_diag` standing in for the
    /// not-yet-committed anti-diagonal `s_new`.
    fn gamma(&self, new_diag: &[u64], s_new: usize, i: usize, j: usize) -> u64 {
        if i == j {
            return 0;
        }
        if j == 1 {
            return 1;
        }
        if i == 1 {
            return self.p - 1;
        }
        let (a, b, negate) = if i > j { (i, j, false) } else { (j, i, true) };
        let s = a + b;
        let row: &[u64] = if s == s_new { new_diag } else { &self.diags[s] };
        let value = row[a - diag_start(s)];
        if negate { modp::neg(value, self.p) } else { value }
    }

    /// The anti-diagonal `i + j = next_index + 2` induced by the candidate
    /// value `x` for `mu_{next_index}`. The base entry is `gamma(s-2, 2) = x`;
    /// each further entry uses `gamma(i, j) = gamma(i, j-1) - gamma(i+1, j-1)`,
    /// where the first term lives on diagonal `s - 1` and the second is the
    /// previously filled entry of this same diagonal.
    fn candidate_diag(&self, x: u64) -> Vec<u64> {
        let s = self.next_index() + 2;
        let start = diag_start(s);
        let mut diag = vec![0u64; s - 1 - start];
        diag[s - 2 - start] = x;
        let empty: [u64; 0] = [];
        for i in (start..=s.saturating_sub(3)).rev() {
            let j = s - i;
            let a = self.gamma(&empty, usize::MAX, i, j - 1);
            let b = diag[i + 1 - start];
            diag[i - start] = modp::sub(a, b, self.p);
        }
        diag
    }

    /// First failing Jacobi triple on the shell `i + j + k = next_index + 2`,
    /// under the candidate diagonal.
    fn shell_failure(&self, new_diag: &[u64]) -> Option<(usize, usize, usize)> {
        let s = self.next_index() + 2;
        let p = self.p;
        for i in 1..s {
            for j in (i + 1)..s {
                let Some(k) = s.checked_sub(i + j) else { break };
                if k <= j {
                    break;
                }
                let t1 = modp::mul(
                    self.gamma(new_diag, s, i, j),
                    self.gamma(new_diag, s, i + j, k),
                    p,
                );
                let t2 = modp::mul(
                    self.gamma(new_diag, s, j, k),
                    self.gamma(new_diag, s, j + k, i),
                    p,
                );
                let t3 = modp::mul(
                    self.gamma(new_diag, s, k, i),
                    self.gamma(new_diag, s, k + i, j),
                    p,
                );
                let residual = modp::add(modp::add(t1, t2, p), t3, p);
                if residual != 0 {
                    return Some((i, j, k));
                }
            }
        }
        None
    }

    fn push(&mut self, x: u64, diag: Vec<u64>) {
        self.mu.push(x);
        self.diags.push(diag);
    }

    /// Admissible values for the next weight, plus the failing triple of the
    /// smallest rejected candidate (the death witness when the set is empty).
    fn admissible(&self, pin: Option<u64>) -> (Vec<(u64, Vec<u64>)>, Option<(usize, usize, usize)>) {
        let mut ok = Vec::new();
        let mut first_fail = None;
        let candidates: Vec<u64> = match pin {
            Some(v) => vec![v],
            None => (0..self.p).collect(),
        };
        for x in candidates {
            let diag = self.candidate_diag(x);
            match self.shell_failure(&diag) {
                None => ok.push((x, diag)),
                Some(triple) => {
                    if first_fail.is_none() {
                        first_fail = Some(triple);
                    }
                }
            }
        }
        (ok, first_fail)
    }
}

/// The spec'd reference implementation of one extension step: for each field
/// value, re-derive the full table at bound `w + 3` and scan every Jacobi
/// triple in the window.
pub fn extend_one_step_rederived(p: u64, prefix: &[u64]) -> Result<Vec<u64>, ClassifyError> {
    let field = FieldDescriptor::prime(p)?;
    let w = prefix.len() + 2;
    let mut out = Vec::new();
    for x in 0..p {
        let mut mu: Vec<Scalar> = prefix.iter().map(|&v| Scalar::residue(p, v)).collect();
        mu.push(Scalar::residue(p, x));
        let table = Type2Table::derive(field, w + 3, mu).expect("coefficient count");
        if table.jacobi_check().passed() {
            out.push(x);
        }
    }
    let _ = w;
    Ok(out)
}

/// Admissible values for `mu_{w+1}` given a Jacobi-consistent prefix
/// `mu_3..mu_w`. Errors if the prefix itself is inconsistent.
pub fn extend_one_step(p: u64, prefix: &[u64]) -> Result<Vec<u64>, ClassifyError> {
    FieldDescriptor::prime(p)?;
    let state = replay_prefix(p, prefix)?;
    let (ok, _) = state.admissible(None);
    Ok(ok.into_iter().map(|(x, _)| x).collect())
}

fn replay_prefix(p: u64, prefix: &[u64]) -> Result<SearchState, ClassifyError> {
    let mut state = SearchState::new(p);
    for &value in prefix {
        let diag = state.candidate_diag(value % p);
        if state.shell_failure(&diag).is_some() {
            return Err(ClassifyError::PrefixInconsistent { died_at: state.next_index() });
        }
        state.push(value % p, diag);
    }
    Ok(state)
}

struct SearchCtx {
    p: u64,
    bound: usize,
    seeds: BTreeMap<usize, u64>,
    max_nodes: u64,
    nodes: AtomicU64,
    budget_hit: AtomicBool,
    parallel: bool,
}

#[derive(Default)]
struct Outcomes {
    survivors: Vec<Vec<u64>>,
    dead: Vec<DeadBranch>,
    frontier: Vec<Vec<u64>>,
}

impl Outcomes {
    fn merge(&mut self, mut other: Outcomes) {
        self.survivors.append(&mut other.survivors);
        self.dead.append(&mut other.dead);
        self.frontier.append(&mut other.frontier);
    }
}

fn explore(ctx: &SearchCtx, state: SearchState) -> Outcomes {
    let mut out = Outcomes::default();
    if state.next_index() > ctx.bound - 2 {
        out.survivors.push(state.mu);
        return out;
    }
    if ctx.max_nodes > 0 {
        let seen = ctx.nodes.fetch_add(1, Ordering::Relaxed);
        if seen >= ctx.max_nodes || ctx.budget_hit.load(Ordering::Relaxed) {
            ctx.budget_hit.store(true, Ordering::Relaxed);
            out.frontier.push(state.mu);
            return out;
        }
    } else {
        ctx.nodes.fetch_add(1, Ordering::Relaxed);
    }
    let pin = ctx.seeds.get(&state.next_index()).copied();
    let (candidates, first_fail) = state.admissible(pin);
    if candidates.is_empty() {
        let died_at = state.next_index();
        out.dead.push(DeadBranch {
            prefix: state.mu,
            died_at,
            witness: first_fail.expect("some candidate failed"),
        });
        return out;
    }
    let children: Vec<SearchState> = candidates
        .into_iter()
        .map(|(x, diag)| {
            let mut child = state.clone();
            child.push(x, diag);
            child
        })
        .collect();
    // spawn only near the root; deep subtrees stay sequential
    let results: Vec<Outcomes> = if ctx.parallel && children.len() > 1 && state.mu.len() < 16 {
        children.into_par_iter().map(|c| explore(ctx, c)).collect()
    } else {
        children.into_iter().map(|c| explore(ctx, c)).collect()
    };
    for r in results {
        out.merge(r);
    }
    out
}

/// Depth-first enumeration of all Jacobi-consistent mu-sequences up to the
/// bound, with named-algebra recognition on the surviving leaves.
pub fn classify(options: &ClassifyOptions) -> Result<ClassificationReport, ClassifyError> {
    let field = FieldDescriptor::prime(options.p)?;
    let p = options.p;
    let bound = options.bound.max(5);
    let max_index = bound - 2;
    let mut seeds: BTreeMap<usize, u64> = BTreeMap::new();
    for &(index, value) in &options.seeds {
        if index < 3 || index > max_index {
            return Err(ClassifyError::BadSeed { index, max: max_index });
        }
        seeds.insert(index, value % p);
    }

    let ctx = SearchCtx {
        p,
        bound,
        seeds,
        max_nodes: options.max_nodes,
        nodes: AtomicU64::new(0),
        budget_hit: AtomicBool::new(false),
        parallel: options.jobs != 1,
    };

    let run = || -> Outcomes {
        let mut out = Outcomes::default();
        for &mu3 in options.branch.mu3_values() {
            if let Some(&pinned) = ctx.seeds.get(&3) {
                if pinned != mu3 {
                    continue;
                }
            }
            let state = SearchState::new(p);
            let diag = state.candidate_diag(mu3);
            if state.shell_failure(&diag).is_some() {
                out.dead.push(DeadBranch { prefix: vec![], died_at: 3, witness: (1, 2, 3) });
                continue;
            }
            let mut root = state;
            root.push(mu3, diag);
            out.merge(explore(&ctx, root));
        }
        out
    };

    let mut outcome = if options.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .expect("thread pool");
        pool.install(run)
    } else if options.jobs == 0 {
        run()
    } else {
        run()
    };

    outcome.survivors.sort();
    outcome.dead.sort_by(|a, b| a.prefix.cmp(&b.prefix));
    outcome.frontier.sort();

    let named = named_tables(&field, bound)?;
    let survivors = outcome
        .survivors
        .into_iter()
        .map(|mu| {
            let first_constituent = mu
                .iter()
                .position(|&v| v != 0)
                .map(|k| (k + 3) + 1);
            let recognized = named
                .iter()
                .find(|(_, pattern)| *pattern == mu)
                .map(|(name, _)| name.clone());
            SurvivorRecord { mu, first_constituent, recognized }
        })
        .collect();

    Ok(ClassificationReport {
        p,
        bound,
        branch: options.branch,
        survivors,
        dead: outcome.dead,
        nodes_expanded: ctx.nodes.load(Ordering::Relaxed),
        complete: !ctx.budget_hit.load(Ordering::Relaxed),
        frontier: outcome.frontier,
    })
}

/// Residue mu-patterns of the named algebras at this field and bound.
fn named_tables(
    field: &FieldDescriptor,
    bound: usize,
) -> Result<Vec<(String, Vec<u64>)>, ClassifyError> {
    let p = field.characteristic();
    let to_residues = |t: &Type2Table| -> Vec<u64> {
        t.mu_slice().iter().map(|s| s.as_residue().expect("prime residue")).collect()
    };
    let mut out = Vec::new();
    out.push(("m".to_string(), vec![0; bound - 4]));
    out.push(("m2".to_string(), vec![1; bound - 4]));
    let mut q = p;
    while (q as usize) + 2 <= bound {
        if q >= 3 {
            let t = q_algebra(*field, bound, q)?;
            out.push((format!("q_algebra {q}"), to_residues(&t)));
        }
        q = q.saturating_mul(p);
    }
    if p == 3 {
        for lam in 0..3 {
            let t = l_lambda(*field, bound, &Scalar::residue(3, lam))?;
            out.push((format!("l_lambda {lam}"), to_residues(&t)));
        }
    }
    Ok(out)
}

/// Outcome of seeding the classifier with the two defining relations of the
/// metabelian presentation: `[e_3 e_2] = e_5`, `[e_5 e_2] = e_7`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M2PresentationReport {
    pub p: u64,
    pub bound: usize,
    pub survivor_count: usize,
    pub unique_extension_is_m2: bool,
}

pub fn verify_presentation_m2(p: u64, bound: usize) -> Result<M2PresentationReport, ClassifyError> {
    let mut options = ClassifyOptions::new(p, bound, BranchFilter::E3Nonzero);
    if bound < 7 {
        return Err(ClassifyError::VerificationBound { bound, need: 7 });
    }
    options.seeds = vec![(3, 1), (5, 1)];
    let report = classify(&options)?;
    let m2: Vec<u64> = vec![1; bound - 4];
    Ok(M2PresentationReport {
        p,
        bound,
        survivor_count: report.survivors.len(),
        unique_extension_is_m2: report.survivors.len() == 1 && report.survivors[0].mu == m2,
    })
}

/// Fate of one lambda-child in the first-constituent-(q+1) branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchFate {
    /// Highest weight that admitted no extension anywhere in the subtree.
    Dead { last_death_weight: usize },
    SurvivedToBound,
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaBranchReport {
    pub p: u64,
    pub q: u64,
    pub bound: usize,
    /// Values of `mu_{2q+1}` whose subtree stays consistent past weight
    /// `3q + 2` (the window carrying the constraints that cut the set down).
    pub admissible_lambda: Vec<u64>,
    /// Residues of -1/2 and -1/4.
    pub minus_half: u64,
    pub minus_quarter: u64,
    pub quarter_branch: BranchFate,
    /// The distinguished path choosing -1/2 at every window survives to the
    /// bound and equals the q-algebra builder coefficient-for-coefficient.
    pub half_branch_matches_q_algebra: bool,
    /// Survivors that chose -1/2 at weight 2q+1; entries beyond the first
    /// are truncation-edge forks whose killing identities lie past the bound.
    pub half_subtree_survivors: usize,
    /// `mu_{2tq+k} = 0` for `1 < k < q` on the distinguished branch.
    pub zero_windows_hold: bool,
}

pub fn verify_lambda_branch(p: u64, q: u64, bound: usize) -> Result<LambdaBranchReport, ClassifyError> {
    let field = FieldDescriptor::prime(p)?;
    crate::constructions::check_q_power(p, q)?;
    if q == 3 {
        return Err(ClassifyError::QTooSmall);
    }
    let qs = q as usize;
    if bound < 3 * qs + 4 {
        return Err(ClassifyError::VerificationBound { bound, need: 3 * qs + 4 });
    }
    let mut options = ClassifyOptions::new(p, bound, BranchFilter::E3Zero);
    options.seeds = (3..qs).map(|i| (i, 0)).chain([(qs, 1)]).collect();
    let report = classify(&options)?;

    let lambda_index = 2 * qs + 1;
    let at = |mu: &[u64], weight: usize| mu.get(weight - 3).copied();
    // deepest weight reached per lambda value
    let mut reach: BTreeMap<u64, usize> = BTreeMap::new();
    let mut died: BTreeMap<u64, usize> = BTreeMap::new();
    for s in &report.survivors {
        if let Some(v) = at(&s.mu, lambda_index) {
            reach.insert(v, bound);
        }
    }
    for d in &report.dead {
        if let Some(v) = at(&d.prefix, lambda_index) {
            let reached = d.died_at - 1;
            let r = reach.entry(v).or_insert(0);
            *r = (*r).max(reached);
            let dd = died.entry(v).or_insert(0);
            *dd = (*dd).max(d.died_at);
        }
    }
    let admissible_lambda: Vec<u64> =
        reach.iter().filter(|(_, &r)| r > 3 * qs + 2).map(|(&v, _)| v).collect();

    let two = Scalar::residue(p, 2);
    let minus_half = two.invert()?.neg().as_residue().unwrap();
    let minus_quarter = Scalar::residue(p, 4).invert()?.neg().as_residue().unwrap();

    let quarter_branch = if report
        .survivors
        .iter()
        .any(|s| at(&s.mu, lambda_index) == Some(minus_quarter))
    {
        BranchFate::SurvivedToBound
    } else if let Some(&w) = died.get(&minus_quarter) {
        BranchFate::Dead { last_death_weight: w }
    } else {
        BranchFate::Missing
    };

    let q_table = q_algebra(field, bound, q)?;
    let q_mu: Vec<u64> = q_table.mu_slice().iter().map(|s| s.as_residue().unwrap()).collect();
    let half_survivors: Vec<&SurvivorRecord> = report
        .survivors
        .iter()
        .filter(|s| at(&s.mu, lambda_index) == Some(minus_half))
        .collect();
    let half_branch_matches_q_algebra = half_survivors.iter().any(|s| s.mu == q_mu);
    let half_subtree_survivors = half_survivors.len();

    let zero_windows_hold = half_branch_matches_q_algebra && {
        let mut ok = true;
        let mut t = 1;
        while 2 * t * qs + 2 <= bound {
            for k in 2..qs {
                let i = 2 * t * qs + k;
                if i + 2 <= bound && q_mu.get(i - 3) != Some(&0) {
                    ok = false;
                }
            }
            t += 1;
        }
        ok
    };

    Ok(LambdaBranchReport {
        p,
        q,
        bound,
        admissible_lambda,
        minus_half,
        minus_quarter,
        quarter_branch,
        half_branch_matches_q_algebra,
        half_subtree_survivors,
        zero_windows_hold,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P3FamilyReport {
    pub bound: usize,
    /// For lambda = 0, 1, 2: the seeded branch extends uniquely to the bound
    /// and equals the family member.
    pub unique_and_matches: [bool; 3],
    /// Every deviation `mu_6 != -1 - lambda` dies at a finite weight.
    pub deviations_die: bool,
    pub last_deviation_death: usize,
}

pub fn verify_p3_family(bound: usize) -> Result<P3FamilyReport, ClassifyError> {
    let field = FieldDescriptor::prime(3)?;
    if bound < 9 {
        return Err(ClassifyError::VerificationBound { bound, need: 9 });
    }
    let mut unique_and_matches = [false; 3];
    let mut deviations_die = true;
    let mut last_deviation_death = 0;
    for lam in 0..3u64 {
        let expected = l_lambda(field, bound, &Scalar::residue(3, lam))?;
        let expected_mu: Vec<u64> =
            expected.mu_slice().iter().map(|s| s.as_residue().unwrap()).collect();
        let mut options = ClassifyOptions::new(3, bound, BranchFilter::E3Nonzero);
        options.seeds = vec![(3, 1), (4, 1), (5, lam)];
        let report = classify(&options)?;
        unique_and_matches[lam as usize] =
            report.survivors.len() == 1 && report.survivors[0].mu == expected_mu;

        // deviating mu_6 must die
        let good_mu6 = expected_mu[3];
        for bad in 0..3u64 {
            if bad == good_mu6 {
                continue;
            }
            let mut options = ClassifyOptions::new(3, bound, BranchFilter::E3Nonzero);
            options.seeds = vec![(3, 1), (4, 1), (5, lam), (6, bad)];
            let report = classify(&options)?;
            if !report.survivors.is_empty() {
                deviations_die = false;
            }
            for d in &report.dead {
                last_deviation_death = last_deviation_death.max(d.died_at);
            }
        }
    }
    Ok(P3FamilyReport { bound, unique_and_matches, deviations_die, last_deviation_death })
}
