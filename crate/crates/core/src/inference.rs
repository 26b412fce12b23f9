//! Per-bit binary code inference.
//!
//! For bit `r` the codes of all training examples solve the binary quadratic
//! program `min_z Σ_i Σ_j a_ij z_i z_j` over `z ∈ {-1, +1}^n`, where
//! `a_ij = l11 - l_neg11` of the defined pair `(i, j)`. The solvers here are
//! Block GraphCut (block coordinate descent where each block is solved
//! exactly by an s-t min-cut), ICM (the single-variable special case), a
//! spectral relaxation and an exhaustive search used as an oracle.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::loss::{pair_coefficient, LossKind, PairState};
use crate::maxflow::{reduce_energy_to_cut, EnergyInstance};
use crate::similarity::SimilarityGraph;

const NONE: u32 = u32::MAX;

/// Symmetric sparse coefficient matrix of one bit's quadratic program.
/// The diagonal is zero; only nonzero off-diagonal entries are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct BqpInstance {
    n: usize,
    entries: Vec<(u32, u32, f64)>,
    offsets: Vec<usize>,
    adjacency: Vec<(u32, f64)>,
}

impl BqpInstance {
    /// Builds the program for bit `r` (1-based). `prev_distance[p]` is the
    /// Hamming distance of pair `sim.pairs()[p]` over bits `1..r`.
    pub fn build(sim: &SimilarityGraph, kind: LossKind, r: u32, prev_distance: &[u32]) -> Result<Self> {
        if prev_distance.len() != sim.pair_count() {
            return Err(Error::contract("one previous distance per pair is required"));
        }
        let mut entries = Vec::with_capacity(sim.pair_count());
        for (p, &d) in sim.pairs().iter().zip(prev_distance) {
            let a = pair_coefficient(kind, PairState::new(p.y, r, d)?);
            if a != 0.0 {
                entries.push((p.i, p.j, a));
            }
        }
        Ok(Self::from_sorted(sim.n(), entries))
    }

    /// Builds an instance from upper-triangle entries `(i, j, a_ij)`.
    pub fn from_entries(n: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut out: Vec<(u32, u32, f64)> = Vec::with_capacity(entries.len());
        for &(i, j, a) in entries {
            if i >= n || j >= n || i == j || !a.is_finite() {
                return Err(Error::contract(format!("invalid entry ({i}, {j}, {a})")));
            }
            out.push((i.min(j) as u32, i.max(j) as u32, a));
        }
        out.sort_by_key(|&(i, j, _)| (i, j));
        if out.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::contract("duplicate entry"));
        }
        out.retain(|e| e.2 != 0.0);
        Ok(Self::from_sorted(n, out))
    }

    fn from_sorted(n: usize, entries: Vec<(u32, u32, f64)>) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(i, j, _) in &entries {
            offsets[i as usize + 1] += 1;
            offsets[j as usize + 1] += 1;
        }
        for k in 0..n {
            offsets[k + 1] += offsets[k];
        }
        let mut fill = offsets.clone();
        let mut adjacency = vec![(0u32, 0.0); offsets[n]];
        for &(i, j, a) in &entries {
            adjacency[fill[i as usize]] = (j, a);
            fill[i as usize] += 1;
            adjacency[fill[j as usize]] = (i, a);
            fill[j as usize] += 1;
        }
        BqpInstance {
            n,
            entries,
            offsets,
            adjacency,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Upper-triangle nonzeros `(i, j, a_ij)`, `i < j`.
    pub fn entries(&self) -> &[(u32, u32, f64)] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[(u32, f64)] {
        &self.adjacency[self.offsets[i]..self.offsets[i + 1]]
    }

    /// `a_ij`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i)
            .iter()
            .find(|&&(k, _)| k as usize == j)
            .map_or(0.0, |&(_, a)| a)
    }

    /// `zᵀ A z` summed over both orders of every pair.
    pub fn objective(&self, z: &[i8]) -> f64 {
        2.0 * self
            .entries
            .iter()
            .map(|&(i, j, a)| a * (z[i as usize] * z[j as usize]) as f64)
            .sum::<f64>()
    }

    /// `zᵀ A z` for a real vector.
    pub fn quadratic(&self, z: &[f64]) -> f64 {
        2.0 * self
            .entries
            .iter()
            .map(|&(i, j, a)| a * z[i as usize] * z[j as usize])
            .sum::<f64>()
    }

    /// `y = A x`.
    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().map(|&(j, a)| a * x[j as usize]).sum();
        }
    }

    /// `Σ_j a_ij z_j`.
    #[inline]
    pub fn local_field(&self, i: usize, z: &[i8]) -> f64 {
        self.row(i).iter().map(|&(j, a)| a * z[j as usize] as f64).sum()
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn row_sum_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|&(_, a)| a.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Examples with no dissimilar pair among them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    members: Vec<u32>,
}

impl Block {
    /// Validates that `members` is nonempty, duplicate-free and contains no
    /// dissimilar pair.
    pub fn new(members: Vec<u32>, sim: &SimilarityGraph) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::contract("empty block"));
        }
        let mut sorted = members.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::contract("block has repeated members"));
        }
        if sorted.last().is_some_and(|&m| m as usize >= sim.n()) {
            return Err(Error::contract("block member out of range"));
        }
        for &i in &members {
            for nb in sim.neighbors(i as usize) {
                if nb.y < 0 && sorted.binary_search(&nb.node).is_ok() {
                    return Err(Error::contract(format!(
                        "block contains dissimilar pair ({i}, {})",
                        nb.node
                    )));
                }
            }
        }
        Ok(Block { members })
    }

    pub fn singleton(i: usize) -> Self {
        Block {
            members: vec![i as u32],
        }
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Blocks whose union covers every example; blocks may overlap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCover {
    blocks: Vec<Block>,
}

impl BlockCover {
    pub fn new(n: usize, blocks: Vec<Block>) -> Result<Self> {
        let mut covered = vec![false; n];
        for b in &blocks {
            for &i in b.members() {
                *covered.get_mut(i as usize).ok_or_else(|| Error::contract("block member out of range"))? = true;
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::contract(format!("example {i} is not covered by any block")));
        }
        Ok(BlockCover { blocks })
    }

    /// One block per example.
    pub fn singletons(n: usize) -> Self {
        BlockCover {
            blocks: (0..n).map(Block::singleton).collect(),
        }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn mean_block_size(&self) -> f64 {
        if self.blocks.is_empty() {
            return 0.0;
        }
        self.blocks.iter().map(Block::len).sum::<usize>() as f64 / self.blocks.len() as f64
    }
}

/// Greedy block construction.
///
/// Repeatedly picks a random uncovered example, then tries it and each of
/// its similar neighbors that are still uncovered (in adjacency order),
/// admitting a candidate when it is not dissimilar to any current member.
pub fn build_blocks<R: Rng>(sim: &SimilarityGraph, rng: &mut R) -> BlockCover {
    let n = sim.n();
    let mut uncovered: Vec<u32> = (0..n as u32).collect();
    let mut position: Vec<u32> = (0..n as u32).collect();
    let mut in_block = vec![false; n];
    let mut blocks = Vec::new();

    let remove = |uncovered: &mut Vec<u32>, position: &mut Vec<u32>, x: u32| {
        let p = position[x as usize] as usize;
        let last = *uncovered.last().unwrap();
        uncovered.swap_remove(p);
        if last != x {
            position[last as usize] = p as u32;
        }
        position[x as usize] = NONE;
    };

    while !uncovered.is_empty() {
        let seed = uncovered[rng.random_range(0..uncovered.len())];
        let candidates = std::iter::once(seed).chain(
            sim.neighbors(seed as usize)
                .iter()
                .filter(|nb| nb.y > 0 && position[nb.node as usize] != NONE)
                .map(|nb| nb.node),
        );
        let candidates: Vec<u32> = candidates.collect();
        let mut members = Vec::new();
        for c in candidates {
            let clash = sim
                .neighbors(c as usize)
                .iter()
                .any(|nb| nb.y < 0 && in_block[nb.node as usize]);
            if !clash {
                in_block[c as usize] = true;
                members.push(c);
                remove(&mut uncovered, &mut position, c);
            }
        }
        for &m in &members {
            in_block[m as usize] = false;
        }
        blocks.push(Block { members });
    }
    BlockCover { blocks }
}

/// Energy of a block's variables with every other code held fixed.
///
/// In-block pairs appear twice, as `(i, j, a_ij)` and `(j, i, a_ij)`,
/// mirroring the ordered double sum of the full objective. The linear term
/// of member `i` is `u_i = 2 Σ_{j ∉ B} a_ij ẑ_j`. Variables are indexed by
/// position in the block.
pub fn assemble_block_energy(bqp: &BqpInstance, block: &Block, codes: &[i8]) -> Result<EnergyInstance> {
    let mut local = vec![NONE; bqp.n()];
    for (k, &i) in block.members().iter().enumerate() {
        local[i as usize] = k as u32;
    }
    let (u, pairwise) = block_terms(bqp, block, codes, &local);
    EnergyInstance::from_linear(&u, pairwise)
}

fn block_terms(
    bqp: &BqpInstance,
    block: &Block,
    codes: &[i8],
    local: &[u32],
) -> (Vec<f64>, Vec<(usize, usize, f64)>) {
    let mut u = vec![0.0; block.len()];
    let mut pairwise = Vec::new();
    for (k, &i) in block.members().iter().enumerate() {
        for &(j, a) in bqp.row(i as usize) {
            match local[j as usize] {
                NONE => u[k] += 2.0 * a * codes[j as usize] as f64,
                l => pairwise.push((k, l as usize, a)),
            }
        }
    }
    (u, pairwise)
}

/// One block update as seen by an observer.
pub struct BlockUpdate<'a> {
    pub block: &'a Block,
    /// Block assignment before the update.
    pub before: &'a [i8],
    /// Block assignment after the update.
    pub after: &'a [i8],
    /// All codes after the update.
    pub codes: &'a [i8],
}

#[derive(Clone, Copy, Debug)]
pub struct BlockGcOptions {
    pub sweeps: usize,
    /// Recompute the full objective after every update and fail if it grew.
    pub verify: bool,
}

impl Default for BlockGcOptions {
    fn default() -> Self {
        BlockGcOptions {
            sweeps: 2,
            verify: false,
        }
    }
}

/// Block GraphCut for one bit: `sweeps` passes over the blocks in a fresh
/// random order, each block solved exactly given the rest. A block's new
/// assignment is written back only if it strictly lowers the objective.
pub fn block_graphcut_bit<R: Rng>(
    bqp: &BqpInstance,
    cover: &BlockCover,
    init: &[i8],
    opts: BlockGcOptions,
    rng: &mut R,
) -> Result<Vec<i8>> {
    block_graphcut_observed(bqp, cover, init, opts, rng, |_| {})
}

/// [`block_graphcut_bit`] reporting every block update to `observe`.
pub fn block_graphcut_observed<R: Rng, F: FnMut(&BlockUpdate<'_>)>(
    bqp: &BqpInstance,
    cover: &BlockCover,
    init: &[i8],
    opts: BlockGcOptions,
    rng: &mut R,
    mut observe: F,
) -> Result<Vec<i8>> {
    if opts.sweeps == 0 {
        return Err(Error::contract("Block GraphCut needs at least one sweep"));
    }
    if init.len() != bqp.n() {
        return Err(Error::contract("initial codes do not match the instance size"));
    }
    let mut z = init.to_vec();
    let mut local = vec![NONE; bqp.n()];
    let mut order: Vec<usize> = (0..cover.len()).collect();
    let mut last_objective = if opts.verify { bqp.objective(&z) } else { 0.0 };
    for _ in 0..opts.sweeps {
        order.shuffle(rng);
        for &b in &order {
            let block = &cover.blocks()[b];
            let before: Vec<i8> = block.members().iter().map(|&i| z[i as usize]).collect();
            if block.len() == 1 {
                let i = block.members()[0] as usize;
                let field = bqp.local_field(i, &z);
                // energy of z_i is 2 field z_i; flip when that is positive
                let scale: f64 = bqp.row(i).iter().map(|&(_, a)| a.abs()).sum();
                if field * z[i] as f64 > 1e-12 * scale {
                    z[i] = -z[i];
                }
            } else {
                for (k, &i) in block.members().iter().enumerate() {
                    local[i as usize] = k as u32;
                }
                let (u, pairwise) = block_terms(bqp, block, &z, &local);
                for &i in block.members() {
                    local[i as usize] = NONE;
                }
                let energy = EnergyInstance::from_linear(&u, pairwise)?;
                let (assignment, best) = reduce_energy_to_cut(&energy)?.solve();
                let current = energy.energy(&before);
                let scale: f64 = u.iter().map(|x| x.abs()).sum::<f64>()
                    + energy.pairwise().iter().map(|p| p.2.abs()).sum::<f64>();
                if best < current - 1e-12 * scale.max(1.0) {
                    for (&i, &zi) in block.members().iter().zip(&assignment) {
                        z[i as usize] = zi;
                    }
                }
            }
            if opts.verify {
                let now = bqp.objective(&z);
                if now > last_objective + 1e-9 * last_objective.abs().max(1.0) {
                    return Err(Error::Numeric(format!(
                        "block update raised the objective from {last_objective} to {now}"
                    )));
                }
                last_objective = now;
            }
            let after: Vec<i8> = block.members().iter().map(|&i| z[i as usize]).collect();
            observe(&BlockUpdate {
                block,
                before: &before,
                after: &after,
                codes: &z,
            });
        }
    }
    Ok(z)
}

/// Iterated conditional modes: Block GraphCut over singleton blocks.
pub fn icm_bit<R: Rng>(bqp: &BqpInstance, init: &[i8], opts: BlockGcOptions, rng: &mut R) -> Result<Vec<i8>> {
    block_graphcut_bit(bqp, &BlockCover::singletons(bqp.n()), init, opts, rng)
}

/// Runs ICM sweeps until nothing changes (at most `max_sweeps`).
pub fn icm_until_converged<R: Rng>(bqp: &BqpInstance, init: &[i8], max_sweeps: usize, rng: &mut R) -> Result<Vec<i8>> {
    let mut z = init.to_vec();
    for _ in 0..max_sweeps {
        let next = icm_bit(bqp, &z, BlockGcOptions { sweeps: 1, verify: false }, rng)?;
        if next == z {
            break;
        }
        z = next;
    }
    Ok(z)
}

#[derive(Clone, Copy, Debug)]
pub struct SpectralOptions {
    /// Projected-gradient steps inside the box `[-1, 1]^n`.
    pub refine_iters: usize,
    /// Lanczos steps per restart.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Residual `‖A v - λ v‖` accepted as converged, relative to `σ`, the
    /// largest absolute row sum of `A`.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            refine_iters: 50,
            krylov_dim: 80,
            max_restarts: 50,
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectralOutcome {
    pub codes: Vec<i8>,
    /// Minimum eigenvector scaled to squared norm `n`, before box refinement.
    pub relaxed: Vec<f64>,
    pub eigenvalue: f64,
    /// Matrix-vector products spent on the eigenvector.
    pub matvecs: usize,
    /// The eigensolver did not converge; codes come from random init + ICM.
    pub fell_back: bool,
}

/// Spectral relaxation: minimum eigenvector of `A` (restarted Lanczos),
/// box-constrained refinement, then thresholding at 0 (ties +1). Returns
/// the better of the refined and the directly thresholded eigenvector.
pub fn spectral_bit(bqp: &BqpInstance, opts: SpectralOptions) -> Result<SpectralOutcome> {
    let n = bqp.n();
    if n < 2 {
        return Err(Error::contract("spectral inference needs at least two examples"));
    }
    let sigma = bqp.row_sum_bound();
    let scale = (n as f64).sqrt();
    if sigma == 0.0 {
        return Ok(SpectralOutcome {
            codes: vec![1; n],
            relaxed: vec![1.0; n],
            eigenvalue: 0.0,
            matvecs: 0,
            fell_back: false,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
    normalize(&mut v);
    let mut av = vec![0.0; n];
    let mut eigenvalue = f64::INFINITY;
    let mut converged = false;
    let mut matvecs = 0;
    for _ in 0..opts.max_restarts.max(1) {
        let (ritz, lambda, used) = lanczos_min(bqp, &v, opts.krylov_dim.max(2));
        matvecs += used + 1;
        v = ritz;
        bqp.mul(&v, &mut av);
        let residual = av
            .iter()
            .zip(&v)
            .map(|(a, x)| (a - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt();
        // a near-degenerate bottom of the spectrum stalls the vector, not the value
        let stalled = (eigenvalue - lambda).abs() <= 1e-12 * sigma;
        eigenvalue = lambda;
        if residual <= opts.tolerance * sigma || stalled {
            converged = true;
            break;
        }
    }

    if !converged {
        log::warn!("eigensolver did not converge after {matvecs} products; falling back to ICM");
        let init: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let codes = icm_until_converged(bqp, &init, 100, &mut rng)?;
        let relaxed = v.iter().map(|x| x * scale).collect();
        return Ok(SpectralOutcome {
            codes,
            relaxed,
            eigenvalue,
            matvecs,
            fell_back: true,
        });
    }

    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let relaxed: Vec<f64> = v.iter().map(|x| x * scale).collect();
    let raw_codes = threshold(&relaxed);

    let mut z: Vec<f64> = relaxed.iter().map(|x| x.clamp(-1.0, 1.0)).collect();
    refine_in_box(bqp, &mut z, sigma, opts.refine_iters);
    let refined = threshold(&z);

    let codes = if bqp.objective(&refined) <= bqp.objective(&raw_codes) {
        refined
    } else {
        raw_codes
    };
    Ok(SpectralOutcome {
        codes,
        relaxed,
        eigenvalue,
        matvecs,
        fell_back: false,
    })
}

// Lanczos with full reorthogonalization from unit vector `start`; returns
// the unit Ritz vector of the smallest Ritz value, that value, and the
// number of products used.
fn lanczos_min(bqp: &BqpInstance, start: &[f64], steps: usize) -> (Vec<f64>, f64, usize) {
    let n = start.len();
    let steps = steps.min(n);
    let mut basis: Vec<Vec<f64>> = vec![start.to_vec()];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut w = vec![0.0; n];
    for k in 0..steps {
        bqp.mul(&basis[k], &mut w);
        let a = dot(&w, &basis[k]);
        alpha.push(a);
        for q in &basis {
            let c = dot(&w, q);
            w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
        let b = dot(&w, &w).sqrt();
        if k + 1 == steps || b <= 1e-14 * (a.abs() + 1.0) {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    let m = alpha.len();
    let t = nalgebra::DMatrix::from_fn(m, m, |i, j| match i.abs_diff(j) {
        0 => alpha[i],
        1 => beta[i.min(j)],
        _ => 0.0,
    });
    let eig = t.symmetric_eigen();
    let (best, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one Lanczos step");
    let y = eig.eigenvectors.column(best);
    let mut ritz = vec![0.0; n];
    for (q, &c) in basis.iter().zip(y.iter()) {
        ritz.iter_mut().zip(q).for_each(|(x, v)| *x += c * v);
    }
    normalize(&mut ritz);
    (ritz, lambda, m)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn threshold(z: &[f64]) -> Vec<i8> {
    z.iter().map(|&x| if x >= 0.0 { 1 } else { -1 }).collect()
}

// Projected gradient descent on zᵀAz over the box with backtracking.
fn refine_in_box(bqp: &BqpInstance, z: &mut [f64], sigma: f64, iters: usize) {
    let n = z.len();
    let mut grad = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut step = 1.0 / (2.0 * sigma);
    let mut f = bqp.quadratic(z);
    for _ in 0..iters {
        bqp.mul(z, &mut grad);
        grad.iter_mut().for_each(|g| *g *= 2.0);
        let mut accepted = false;
        for _ in 0..30 {
            for k in 0..n {
                trial[k] = (z[k] - step * grad[k]).clamp(-1.0, 1.0);
            }
            let moved: f64 = trial.iter().zip(z.iter()).map(|(a, b)| (a - b).powi(2)).sum();
            if moved == 0.0 {
                return;
            }
            let linear: f64 = grad.iter().zip(trial.iter().zip(z.iter())).map(|(g, (a, b))| g * (a - b)).sum();
            let ft = bqp.quadratic(&trial);
            if ft <= f + linear + moved / (2.0 * step) {
                z.copy_from_slice(&trial);
                f = ft;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return;
        }
        step *= 2.0;
    }
}

/// Largest instance [`brute_force_bqp`] accepts.
pub const BRUTE_FORCE_MAX_N: usize = 20;

/// Exhaustive minimum of `zᵀ A z`. Assignments are scanned from all `+1`
/// downwards in the `{0, 1}` encoding (bit `i` of the counter is example
/// `i`), keeping the first minimum, so ties favour `+1`.
pub fn brute_force_bqp(bqp: &BqpInstance) -> Result<(Vec<i8>, f64)> {
    let n = bqp.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::contract(format!(
            "exhaustive search limited to n <= {BRUTE_FORCE_MAX_N}, got {n}"
        )));
    }
    let decode = |mask: u32| -> Vec<i8> { (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect() };
    let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut best = (full, f64::INFINITY);
    for mask in (0..=full).rev() {
        let value = bqp.objective(&decode(mask));
        if value < best.1 {
            best = (mask, value);
        }
    }
    Ok((decode(best.0), best.1))
}
