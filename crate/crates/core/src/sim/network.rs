//! Poisson deployments in a disk and nearest-AP association.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Point = [f64; 2];

/// Simulation disk, in units of `1/sqrt(λa)` (AP density normalized to one).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimWindow {
    pub radius: f64,
    /// The typical user's serving AP must lie within `guard_fraction * radius`.
    pub guard_fraction: f64,
}

impl Default for SimWindow {
    fn default() -> Self {
        Self {
            radius: 20.0,
            guard_fraction: 0.5,
        }
    }
}

impl SimWindow {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius >= 10.0) {
            return invalid(format!("window radius must be at least 10, got {}", self.radius));
        }
        if !(self.guard_fraction > 0.0 && self.guard_fraction < 1.0) {
            return invalid(format!("guard fraction must lie in (0, 1), got {}", self.guard_fraction));
        }
        Ok(())
    }

    pub fn guard_radius(&self) -> f64 {
        self.radius * self.guard_fraction
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

/// Bucket grid over `[-half, half]²` answering nearest-AP queries.
struct ApGrid<'a> {
    points: &'a [Point],
    half: f64,
    cell: f64,
    side: usize,
    /// CSR layout: APs of bucket `b` are `members[start[b]..start[b + 1]]`.
    start: Vec<usize>,
    members: Vec<u32>,
}

impl<'a> ApGrid<'a> {
    fn new(points: &'a [Point], half: f64) -> Self {
        // about one AP per bucket
        let side = ((points.len() as f64).sqrt().ceil() as usize).clamp(1, 4096);
        let cell = 2.0 * half / side as f64;
        let mut grid = Self {
            points,
            half,
            cell,
            side,
            start: vec![0; side * side + 1],
            members: vec![0; points.len()],
        };
        let buckets: Vec<usize> = points.iter().map(|p| grid.bucket_of(p)).collect();
        for &b in &buckets {
            grid.start[b + 1] += 1;
        }
        for b in 0..side * side {
            grid.start[b + 1] += grid.start[b];
        }
        let mut fill = grid.start.clone();
        for (i, &b) in buckets.iter().enumerate() {
            grid.members[fill[b]] = i as u32;
            fill[b] += 1;
        }
        grid
    }

    fn coord(&self, x: f64) -> usize {
        let c = ((x + self.half) / self.cell).floor();
        (c.max(0.0) as usize).min(self.side - 1)
    }

    fn bucket_of(&self, p: &Point) -> usize {
        self.coord(p[1]) * self.side + self.coord(p[0])
    }

    /// Index of the AP closest to `p`, lowest index on ties.
    fn nearest(&self, p: &Point) -> usize {
        let (cx, cy) = (self.coord(p[0]) as isize, self.coord(p[1]) as isize);
        let side = self.side as isize;
        let mut best = (f64::INFINITY, usize::MAX);
        for ring in 0..=side {
            for dy in -ring..=ring {
                let y = cy + dy;
                if y < 0 || y >= side {
                    continue;
                }
                let step = if dy.abs() == ring { 1 } else { 2 * ring.max(1) };
                let mut dx = -ring;
                while dx <= ring {
                    let x = cx + dx;
                    if x >= 0 && x < side {
                        let b = (y * side + x) as usize;
                        for &i in &self.members[self.start[b]..self.start[b + 1]] {
                            let q = self.points[i as usize];
                            let d2 = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
                            if d2 < best.0 || (d2 == best.0 && (i as usize) < best.1) {
                                best = (d2, i as usize);
                            }
                        }
                    }
                    dx += step;
                }
            }
            // anything in ring + 1 or beyond is at least ring * cell away
            let reach = ring as f64 * self.cell;
            if best.1 != usize::MAX && best.0 < reach * reach {
                break;
            }
        }
        best.1
    }
}

/// One deployment: APs and UEs in a disk, the typical UE at the origin with
/// index 0, and its serving AP relabeled to index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    radius: f64,
    ap_positions: Vec<Point>,
    ue_positions: Vec<Point>,
    association: Vec<u32>,
    cell_counts: Vec<usize>,
    ap_keys: Vec<u64>,
    resampled: u32,
}

const MAX_ATTEMPTS: u32 = 1000;

fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let angle = 2.0 * PI * rng.random::<f64>();
    [r * angle.cos(), r * angle.sin()]
}

fn norm2(p: &Point) -> f64 {
    p[0] * p[0] + p[1] * p[1]
}

/// Draws a deployment with AP density 1 and UE density `ratio`. Realizations
/// without APs, or whose typical UE is served from beyond the guard radius,
/// are redrawn and counted in [`NetworkRealization::resampled`].
pub fn sample_network<R: Rng + ?Sized>(ratio: f64, window: SimWindow, rng: &mut R) -> Result<NetworkRealization> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return invalid(format!("user/AP density ratio must be positive, got {ratio}"));
    }
    window.validate()?;
    let ap_count = Poisson::new(window.area()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let ue_count = Poisson::new(window.area() * ratio).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let guard2 = window.guard_radius().powi(2);
    let mut resampled = 0;
    for _ in 0..MAX_ATTEMPTS {
        let n_ap = ap_count.sample(rng) as usize;
        let n_ue = ue_count.sample(rng) as usize;
        if n_ap == 0 {
            resampled += 1;
            continue;
        }
        let aps: Vec<Point> = (0..n_ap).map(|_| uniform_in_disk(window.radius, rng)).collect();
        let ues: Vec<Point> = (0..n_ue).map(|_| uniform_in_disk(window.radius, rng)).collect();
        let mut real = NetworkRealization::from_points(aps, ues, window.radius)?;
        if norm2(&real.ap_positions[0]) > guard2 {
            resampled += 1;
            continue;
        }
        real.resampled = resampled;
        return Ok(real);
    }
    Err(Error::DegenerateRealization {
        radius: window.radius,
        attempts: MAX_ATTEMPTS,
    })
}

impl NetworkRealization {
    /// Builds a realization from explicit points. The typical UE is placed at
    /// the origin in front of `other_ues`; AP keys follow the order of `aps`.
    pub fn from_points(aps: Vec<Point>, other_ues: Vec<Point>, radius: f64) -> Result<Self> {
        let keys = (0..aps.len() as u64).collect();
        let mut ues = Vec::with_capacity(other_ues.len() + 1);
        ues.push([0.0, 0.0]);
        ues.extend(other_ues);
        Self::assemble(aps, keys, ues, radius)
    }

    fn assemble(mut aps: Vec<Point>, mut keys: Vec<u64>, ues: Vec<Point>, radius: f64) -> Result<Self> {
        if aps.is_empty() {
            return Err(Error::DegenerateRealization { radius, attempts: 1 });
        }
        let half = aps.iter().chain(ues.iter()).fold(radius, |h, p| h.max(p[0].abs()).max(p[1].abs()));
        let serving = ApGrid::new(&aps, half).nearest(&[0.0, 0.0]);
        aps.swap(0, serving);
        keys.swap(0, serving);
        let grid = ApGrid::new(&aps, half);
        let association: Vec<u32> = ues.iter().map(|p| grid.nearest(p) as u32).collect();
        let mut cell_counts = vec![0; aps.len()];
        for &a in &association {
            cell_counts[a as usize] += 1;
        }
        Ok(Self {
            radius,
            ap_positions: aps,
            ue_positions: ues,
            association,
            cell_counts,
            ap_keys: keys,
            resampled: 0,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn ap_positions(&self) -> &[Point] {
        &self.ap_positions
    }

    /// UE 0 is the typical UE at the origin.
    pub fn ue_positions(&self) -> &[Point] {
        &self.ue_positions
    }

    /// Serving AP of each UE.
    pub fn association(&self) -> &[u32] {
        &self.association
    }

    /// UEs per AP; AP 0's count includes the typical UE.
    pub fn cell_counts(&self) -> &[usize] {
        &self.cell_counts
    }

    /// Stable AP identities, kept by [`scaled`](Self::scaled) and
    /// [`restricted`](Self::restricted); they select each AP's random stream.
    pub fn ap_keys(&self) -> &[u64] {
        &self.ap_keys
    }

    /// Deployments discarded before this one was accepted.
    pub fn resampled(&self) -> u32 {
        self.resampled
    }

    pub fn serving_distance(&self) -> f64 {
        norm2(&self.ap_positions[0]).sqrt()
    }

    /// All coordinates multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return invalid(format!("scale factor must be positive, got {factor}"));
        }
        let scale = |pts: &[Point]| pts.iter().map(|p| [p[0] * factor, p[1] * factor]).collect::<Vec<_>>();
        let mut real = Self::assemble(
            scale(&self.ap_positions),
            self.ap_keys.clone(),
            scale(&self.ue_positions),
            self.radius * factor,
        )?;
        real.resampled = self.resampled;
        Ok(real)
    }

    /// The same deployment seen through a smaller disk, with association redone.
    pub fn restricted(&self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= self.radius) {
            return invalid(format!("restriction radius must lie in (0, {}], got {radius}", self.radius));
        }
        let r2 = radius * radius;
        let (aps, keys): (Vec<Point>, Vec<u64>) = self
            .ap_positions
            .iter()
            .zip(&self.ap_keys)
            .filter(|(p, _)| norm2(p) <= r2)
            .map(|(p, k)| (*p, *k))
            .unzip();
        if aps.first() != self.ap_positions.first() {
            return Err(Error::DegenerateRealization { radius, attempts: 1 });
        }
        let ues = self.ue_positions.iter().copied().filter(|p| norm2(p) <= r2).collect();
        let mut real = Self::assemble(aps, keys, ues, radius)?;
        real.resampled = self.resampled;
        Ok(real)
    }
}
