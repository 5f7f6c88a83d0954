//! Simulated annealing over single-cell relabels, followed by a greedy
//! descent, optionally run coarse-to-fine.

use super::crofton::{boundary_sides, grid_energy, sigma_table, volume_penalty, CroftonStencil};
use super::{EnergyBreakdown, GridError, LabelGrid};
use crate::tensions::EnergyParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which constraints the minimizer respects. Frozen cells never change in
/// any mode; `D` and `DV` additionally require them to shield the free
/// cells from the domain boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    D,
    V,
    DV,
}

impl Mode {
    fn has_volumes(self) -> bool {
        matches!(self, Mode::V | Mode::DV)
    }

    fn has_dirichlet(self) -> bool {
        matches!(self, Mode::D | Mode::DV)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// defaults to `max σ · h`
    pub initial_temperature: Option<f64>,
    pub cooling: f64,
    pub sweeps: usize,
    /// greedy descent stops after this many sweeps without an accepted move
    pub quiet_sweeps: usize,
    pub max_greedy_sweeps: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            initial_temperature: None,
            cooling: 0.95,
            sweeps: 400,
            quiet_sweeps: 3,
            max_greedy_sweeps: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub mode: Mode,
    /// areas per fluid over the free cells; `None` keeps the current ones
    pub target_volumes: Option<[f64; 3]>,
    /// defaults to `4 · max σ / h`
    pub volume_penalty_c: Option<f64>,
    pub schedule: Schedule,
    pub crofton_directions: usize,
    pub seed: u64,
    /// relabel the free cells uniformly at random before annealing
    pub random_init: bool,
    /// anneal on successively halved grids first, prolonging each result
    pub multilevel: bool,
    /// keep at most this many accepted annealing moves for inspection
    pub log_moves: usize,
    /// population size: chains on random streams `0..replicas` of `seed`,
    /// annealed side by side; the lowest final energy wins
    pub replicas: usize,
    /// every this many annealing sweeps the worse half of the population
    /// is replaced by copies of the better half; 0 keeps chains independent
    pub resample_every: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            mode: Mode::D,
            target_volumes: None,
            volume_penalty_c: None,
            schedule: Schedule::default(),
            crofton_directions: 8,
            seed: 0,
            random_init: false,
            multilevel: false,
            log_moves: 0,
            replicas: 1,
            resample_every: 0,
        }
    }
}

impl MinimizeOptions {
    pub(crate) fn targets(&self, grid: &LabelGrid) -> Result<[f64; 3], GridError> {
        let targets = self.target_volumes.unwrap_or_else(|| grid.volumes());
        let available = grid.free_area();
        let cell = grid.h() * grid.h();
        let sum: f64 = targets.iter().sum();
        if targets.iter().any(|&v| !(v >= 0.0)) || (sum - available).abs() > cell {
            return Err(GridError::InfeasibleVolumes { targets, available });
        }
        Ok(targets)
    }

    pub(crate) fn penalty(&self, grid: &LabelGrid, p: &EnergyParams) -> f64 {
        self.volume_penalty_c
            .unwrap_or(4.0 * p.sigmas.max() / grid.h())
    }
}

/// One accepted annealing move: accepted iff `delta <= 0` or
/// `u < exp(−delta / temperature)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoveRecord {
    pub delta: f64,
    pub temperature: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    pub grid: LabelGrid,
    /// total energy after every sweep on the finest level
    pub trace: Vec<f64>,
    /// index into `trace` of the first greedy sweep
    pub greedy_start: usize,
    pub moves: Vec<MoveRecord>,
    pub initial: EnergyBreakdown,
    pub energy: EnergyBreakdown,
    /// the annealed result was worse than the input and was discarded
    pub kept_input: bool,
}

pub(crate) fn check_frozen_ring(grid: &LabelGrid) -> Result<(), GridError> {
    for row in 0..grid.height() {
        for col in 0..grid.width() {
            let i = grid.index(row, col);
            if !grid.domain[i] || grid.frozen[i] {
                continue;
            }
            for dr in -2..=2 {
                for dc in -2..=2 {
                    match grid.offset(row, col, dr, dc) {
                        Some(j) if grid.domain[j] => {}
                        _ => return Err(GridError::FrozenRingTooThin { row, col }),
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn minimize(
    grid: &LabelGrid,
    p: &EnergyParams,
    opts: &MinimizeOptions,
) -> Result<MinimizeResult, GridError> {
    CroftonStencil::new(opts.crofton_directions, grid.h())?;
    if !(opts.schedule.cooling > 0.0 && opts.schedule.cooling < 1.0) {
        return Err(GridError::InvalidOptions(format!(
            "cooling factor {} must lie in (0, 1)",
            opts.schedule.cooling
        )));
    }
    if opts.mode.has_dirichlet() {
        check_frozen_ring(grid)?;
    }
    let targets = if opts.mode.has_volumes() {
        Some(opts.targets(grid)?)
    } else {
        None
    };
    // pin the targets so every energy below is measured against the input's volumes
    let eval_opts = MinimizeOptions {
        target_volumes: targets.or(opts.target_volumes),
        ..opts.clone()
    };
    let initial = grid_energy(grid, p, &eval_opts)?;
    let mut population = (0..opts.replicas.max(1) as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k);
            let start = prepare(grid, p, opts, targets, &mut rng)?;
            Ok(Replica {
                annealer: Annealer::new(start, p, opts, targets)?,
                rng,
                trace: Vec::with_capacity(opts.schedule.sweeps + 8),
                moves: Vec::new(),
            })
        })
        .collect::<Result<Vec<_>, GridError>>()?;

    let mut temperature = population[0].annealer.temperature0;
    for sweep in 0..opts.schedule.sweeps {
        population
            .par_iter_mut()
            .for_each(|r| r.anneal_sweep(temperature, opts.log_moves));
        let due = opts.resample_every > 0
            && (sweep + 1) % opts.resample_every == 0
            && sweep + 1 < opts.schedule.sweeps;
        if due && population.len() > 1 {
            resample(&mut population);
        }
        temperature *= opts.schedule.cooling;
    }
    let greedy_start = population[0].trace.len();
    population.par_iter_mut().for_each(|r| r.greedy());

    let finals = population
        .iter()
        .map(|r| grid_energy(&r.annealer.grid, p, &eval_opts))
        .collect::<Result<Vec<_>, GridError>>()?;
    // first replica attaining the least energy
    let best = (0..finals.len()).fold(0, |b, k| {
        if finals[k].total < finals[b].total {
            k
        } else {
            b
        }
    });
    let energy = finals[best];
    let winner = population.swap_remove(best);
    let kept_input = energy.total > initial.total;
    let (grid_out, energy) = if kept_input {
        (grid.clone(), initial)
    } else {
        (winner.annealer.grid, energy)
    };
    Ok(MinimizeResult {
        grid: grid_out,
        trace: winner.trace,
        greedy_start,
        moves: winner.moves,
        initial,
        energy,
        kept_input,
    })
}

/// Ranks by tracked energy (ties by index) and overwrites each of the worse
/// half with a copy of its counterpart in the better half. Random streams
/// stay with their slots, so copies diverge afterwards.
fn resample(population: &mut [Replica]) {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| {
        population[a]
            .annealer
            .energy
            .total_cmp(&population[b].annealer.energy)
            .then(a.cmp(&b))
    });
    let n = order.len();
    for j in 0..n / 2 {
        let (good, bad) = (order[j], order[n - 1 - j]);
        let src = &population[good];
        let copy = (
            src.annealer.grid.labels.clone(),
            src.annealer.volumes,
            src.annealer.energy,
            src.trace.clone(),
            src.moves.clone(),
        );
        let dst = &mut population[bad];
        dst.annealer.grid.labels = copy.0;
        dst.annealer.volumes = copy.1;
        dst.annealer.energy = copy.2;
        dst.trace = copy.3;
        dst.moves = copy.4;
    }
}

struct Replica {
    annealer: Annealer,
    rng: ChaCha8Rng,
    trace: Vec<f64>,
    moves: Vec<MoveRecord>,
}

impl Replica {
    fn anneal_sweep(&mut self, temperature: f64, log_cap: usize) {
        self.annealer
            .anneal_sweep(&mut self.rng, temperature, &mut self.moves, log_cap);
        self.trace.push(self.annealer.energy);
    }

    fn greedy(&mut self) {
        let a = &mut self.annealer;
        let mut quiet = 0;
        for _ in 0..a.schedule.max_greedy_sweeps {
            let accepted = a.greedy_sweep();
            self.trace.push(a.energy);
            if accepted == 0 {
                quiet += 1;
                if quiet >= a.schedule.quiet_sweeps {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
    }
}

/// Random relabelling and coarse-to-fine annealing, as requested, ahead of
/// the finest-level run.
fn prepare(
    grid: &LabelGrid,
    p: &EnergyParams,
    opts: &MinimizeOptions,
    targets: Option<[f64; 3]>,
    rng: &mut ChaCha8Rng,
) -> Result<LabelGrid, GridError> {
    let mut work = grid.clone();
    if opts.random_init {
        for i in 0..work.len() {
            if work.domain[i] && !work.frozen[i] {
                work.labels[i] = rng.gen_range(0..3u8);
            }
        }
    }
    if opts.multilevel {
        let mut pyramid = vec![work];
        while pyramid
            .last()
            .unwrap()
            .width()
            .min(pyramid.last().unwrap().height())
            / 2
            >= 32
        {
            let coarse = coarsen(pyramid.last().unwrap());
            pyramid.push(coarse);
        }
        let fine_free = grid.free_area();
        let mut current = pyramid.pop().unwrap();
        while let Some(mut finer) = pyramid.pop() {
            let level_targets = targets.map(|t| scale_targets(t, current.free_area(), fine_free));
            let mut annealer = Annealer::new(current, p, opts, level_targets)?;
            annealer.run(rng);
            current = annealer.grid;
            prolong(&current, &mut finer);
            current = finer;
        }
        work = current;
    }
    Ok(work)
}

fn scale_targets(t: [f64; 3], level_area: f64, fine_area: f64) -> [f64; 3] {
    let f = if fine_area > 0.0 {
        level_area / fine_area
    } else {
        1.0
    };
    t.map(|v| v * f)
}

/// Halves the resolution: a coarse cell is in the domain (frozen) if any of
/// its fine cells is, and takes the label of its first frozen fine cell, or
/// else of its first in-domain fine cell.
fn coarsen(fine: &LabelGrid) -> LabelGrid {
    let w = fine.width().div_ceil(2);
    let h = fine.height().div_ceil(2);
    let n = w * h;
    let mut labels = vec![0u8; n];
    let mut domain = vec![false; n];
    let mut frozen = vec![false; n];
    for row in 0..h {
        for col in 0..w {
            let ci = row * w + col;
            let mut chosen: Option<u8> = None;
            let mut chosen_frozen = false;
            for (dr, dc) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let (fr, fc) = (2 * row + dr, 2 * col + dc);
                if fr >= fine.height() || fc >= fine.width() {
                    continue;
                }
                let fi = fine.index(fr, fc);
                if !fine.domain[fi] {
                    continue;
                }
                domain[ci] = true;
                if fine.frozen[fi] && !chosen_frozen {
                    chosen = Some(fine.labels[fi]);
                    chosen_frozen = true;
                } else if chosen.is_none() {
                    chosen = Some(fine.labels[fi]);
                }
            }
            labels[ci] = chosen.unwrap_or(0);
            frozen[ci] = chosen_frozen;
        }
    }
    LabelGrid {
        width: w,
        height: h,
        h: 2.0 * fine.h(),
        labels,
        domain,
        frozen,
    }
}

/// Copies coarse labels onto the free cells of the finer grid.
fn prolong(coarse: &LabelGrid, fine: &mut LabelGrid) {
    for row in 0..fine.height() {
        for col in 0..fine.width() {
            let fi = fine.index(row, col);
            if fine.domain[fi] && !fine.frozen[fi] {
                fine.labels[fi] = coarse.labels[coarse.index(row / 2, col / 2)];
            }
        }
    }
}

pub(crate) struct Annealer {
    grid: LabelGrid,
    stencil: Vec<(i64, i64, f64)>,
    sigma: [[f64; 3]; 3],
    beta: [f64; 3],
    rho: [f64; 3],
    g: f64,
    sides: Vec<u8>,
    free: Vec<usize>,
    volumes: [f64; 3],
    targets: Option<[f64; 3]>,
    penalty_c: f64,
    energy: f64,
    schedule: Schedule,
    temperature0: f64,
    /// moves must gain at least this much in the greedy phase
    greedy_floor: f64,
}

impl Annealer {
    pub(crate) fn new(
        grid: LabelGrid,
        p: &EnergyParams,
        opts: &MinimizeOptions,
        targets: Option<[f64; 3]>,
    ) -> Result<Self, GridError> {
        let stencil = CroftonStencil::new(opts.crofton_directions, grid.h())?.full();
        let mut sides = vec![0u8; grid.len()];
        let mut free = Vec::new();
        for row in 0..grid.height() {
            for col in 0..grid.width() {
                let i = grid.index(row, col);
                if grid.domain[i] {
                    sides[i] = boundary_sides(&grid, row, col) as u8;
                    if !grid.frozen[i] {
                        free.push(i);
                    }
                }
            }
        }
        let level_opts = MinimizeOptions {
            mode: if targets.is_some() { Mode::V } else { Mode::D },
            target_volumes: targets,
            ..opts.clone()
        };
        let energy = grid_energy(&grid, p, &level_opts)?.total;
        let h = grid.h();
        Ok(Annealer {
            stencil,
            sigma: sigma_table(p),
            beta: p.beta,
            rho: p.rho,
            g: p.g,
            sides,
            free,
            volumes: grid.volumes(),
            targets,
            penalty_c: opts.penalty(&grid, p),
            energy,
            schedule: opts.schedule,
            temperature0: opts
                .schedule
                .initial_temperature
                .unwrap_or(p.sigmas.max() * h),
            greedy_floor: 1e-12 * p.sigmas.max() * h,
            grid,
        })
    }

    fn delta(&self, i: usize, to: u8) -> f64 {
        let g = &self.grid;
        let from = g.labels[i];
        let (f, t) = (from as usize, to as usize);
        let (row, col) = (i / g.width, i % g.width);
        let mut d = 0.0;
        for &(dr, dc, w) in &self.stencil {
            if let Some(j) = g.offset(row, col, dr, dc) {
                if g.domain[j] {
                    let l = g.labels[j] as usize;
                    d += w * (self.sigma[t][l] - self.sigma[f][l]);
                }
            }
        }
        let h = g.h;
        d += (self.beta[t] - self.beta[f]) * h * self.sides[i] as f64;
        d += (self.rho[t] - self.rho[f]) * self.g * g.center_of(i).y * h * h;
        if let Some(targets) = &self.targets {
            let a = h * h;
            let mut after = self.volumes;
            after[f] -= a;
            after[t] += a;
            d += volume_penalty(&after, targets, self.penalty_c, a)
                - volume_penalty(&self.volumes, targets, self.penalty_c, a);
        }
        d
    }

    fn apply(&mut self, i: usize, to: u8, delta: f64) {
        let a = self.grid.h * self.grid.h;
        let from = self.grid.labels[i];
        self.volumes[from as usize] -= a;
        self.volumes[to as usize] += a;
        self.grid.labels[i] = to;
        self.energy += delta;
    }

    /// Labels of the eight surrounding in-domain cells other than the cell's own.
    fn candidates(&self, i: usize) -> [bool; 3] {
        let g = &self.grid;
        let (row, col) = (i / g.width, i % g.width);
        let mut seen = [false; 3];
        for dr in -1..=1 {
            for dc in -1..=1 {
                if let Some(j) = g.offset(row, col, dr, dc) {
                    if g.domain[j] {
                        seen[g.labels[j] as usize] = true;
                    }
                }
            }
        }
        seen[g.labels[i] as usize] = false;
        seen
    }

    /// One Metropolis pass over the free cells in raster order.
    fn anneal_sweep(
        &mut self,
        rng: &mut ChaCha8Rng,
        temperature: f64,
        log: &mut Vec<MoveRecord>,
        log_cap: usize,
    ) {
        for k in 0..self.free.len() {
            let i = self.free[k];
            let cand = self.candidates(i);
            let n = cand.iter().filter(|&&c| c).count();
            if n == 0 {
                continue;
            }
            let pick = rng.gen_range(0..n);
            let to = (0..3u8).filter(|&l| cand[l as usize]).nth(pick).unwrap();
            let delta = self.delta(i, to);
            let (accept, u) = if delta <= 0.0 {
                (true, 0.0)
            } else {
                let u: f64 = rng.gen();
                (u < (-delta / temperature).exp(), u)
            };
            if accept {
                self.apply(i, to, delta);
                if log.len() < log_cap {
                    log.push(MoveRecord {
                        delta,
                        temperature,
                        u,
                    });
                }
            }
        }
    }

    /// Moves every free cell to its best neighboring label when that lowers
    /// the energy; returns the number of moves.
    fn greedy_sweep(&mut self) -> usize {
        let mut accepted = 0;
        for k in 0..self.free.len() {
            let i = self.free[k];
            let cand = self.candidates(i);
            let mut best: Option<(u8, f64)> = None;
            for to in 0..3u8 {
                if cand[to as usize] {
                    let d = self.delta(i, to);
                    if d < -self.greedy_floor && best.map_or(true, |(_, b)| d < b) {
                        best = Some((to, d));
                    }
                }
            }
            if let Some((to, d)) = best {
                self.apply(i, to, d);
                accepted += 1;
            }
        }
        accepted
    }

    /// Full schedule on a single chain, used on coarse levels.
    fn run(&mut self, rng: &mut ChaCha8Rng) {
        let mut temperature = self.temperature0;
        let mut sink = Vec::new();
        for _ in 0..self.schedule.sweeps {
            self.anneal_sweep(rng, temperature, &mut sink, 0);
            temperature *= self.schedule.cooling;
        }
        let mut quiet = 0;
        for _ in 0..self.schedule.max_greedy_sweeps {
            if self.greedy_sweep() == 0 {
                quiet += 1;
                if quiet >= self.schedule.quiet_sweeps {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
    }
}
