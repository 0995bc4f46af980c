//! Rectangular grids, multilinear interpolation and flat table storage.
//!
//! Nodes are addressed by a row-major flat index with axis 0 varying slowest.
//! That ordering is also the on-disk ordering of the `SRDP` table files (see
//! [`io`]), so it must not change.

pub mod io;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::{Error, Point, Result};

/// Largest supported number of grid axes.
pub const MAX_DIM: usize = 8;

/// Multi-index of a grid node.
pub type NodeIndex = SmallVec<[usize; MAX_DIM]>;

/// One grid axis.
///
/// A non-periodic axis has nodes at `lo + i (hi - lo) / (count - 1)`, both
/// endpoints included. A periodic axis identifies `hi` with `lo` and has nodes
/// at `lo + i (hi - lo) / count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    #[serde(default)]
    pub periodic: bool,
}

/// Cell location of a query along one axis.
#[derive(Debug, Clone, Copy)]
struct Cell {
    lower: usize,
    upper: usize,
    frac: f64,
    clamped: bool,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        let axis = Axis {
            lo,
            hi,
            count,
            periodic: false,
        };
        axis.validate()?;
        Ok(axis)
    }

    pub fn periodic(lo: f64, hi: f64, count: usize) -> Result<Self> {
        let axis = Axis {
            lo,
            hi,
            count,
            periodic: true,
        };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) {
            return Err(Error::InvalidAxis(format!(
                "bounds must be finite, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.lo >= self.hi {
            return Err(Error::InvalidAxis(format!(
                "lo must be below hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.count < 2 {
            return Err(Error::InvalidAxis(format!(
                "at least two nodes required, got {}",
                self.count
            )));
        }
        if self.count > u32::MAX as usize {
            return Err(Error::InvalidAxis(format!("too many nodes: {}", self.count)));
        }
        Ok(())
    }

    fn intervals(&self) -> f64 {
        if self.periodic {
            self.count as f64
        } else {
            (self.count - 1) as f64
        }
    }

    /// Distance between neighbouring nodes.
    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.intervals()
    }

    /// Coordinate of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        if !self.periodic && i + 1 == self.count {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * i as f64 / self.intervals()
    }

    /// Maps `x` into `[lo, hi)` for periodic axes, clamps it into `[lo, hi]`
    /// otherwise.
    pub fn canonical(&self, x: f64) -> f64 {
        if self.periodic {
            let period = self.hi - self.lo;
            let wrapped = self.lo + (x - self.lo).rem_euclid(period);
            if wrapped >= self.hi {
                self.lo
            } else {
                wrapped
            }
        } else {
            x.clamp(self.lo, self.hi)
        }
    }

    /// Fractional node position of `x` after wrapping or clamping.
    fn position(&self, x: f64) -> (f64, bool) {
        if self.periodic {
            let period = self.hi - self.lo;
            let offset = (x - self.lo).rem_euclid(period);
            (offset / period * self.count as f64, false)
        } else {
            let clamped = x < self.lo || x > self.hi;
            let xc = x.clamp(self.lo, self.hi);
            ((xc - self.lo) / (self.hi - self.lo) * self.intervals(), clamped)
        }
    }

    fn locate(&self, x: f64) -> Cell {
        let (pos, clamped) = self.position(x);
        let last = if self.periodic {
            self.count - 1
        } else {
            self.count - 2
        };
        let mut lower = pos.floor() as usize;
        let mut frac = pos - lower as f64;
        if lower > last {
            if self.periodic {
                // offset rounded up to a full period
                lower = 0;
                frac = 0.0;
            } else {
                lower = last;
                frac = pos - last as f64;
            }
        }
        let upper = if self.periodic {
            (lower + 1) % self.count
        } else {
            lower + 1
        };
        Cell {
            lower,
            upper,
            frac,
            clamped,
        }
    }

    /// Index of the node nearest to `x` (wrapping or clamping first).
    pub fn nearest(&self, x: f64) -> usize {
        let (pos, _) = self.position(x);
        let i = pos.round() as usize;
        if self.periodic {
            i % self.count
        } else {
            i.min(self.count - 1)
        }
    }
}

/// Axis-aligned rectangular grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridSpec {
    axes: Vec<Axis>,
    strides: Vec<usize>,
    len: usize,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    axes: Vec<Axis>,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        GridSpec::new(raw.axes)
    }
}

impl From<GridSpec> for RawGrid {
    fn from(grid: GridSpec) -> Self {
        RawGrid { axes: grid.axes }
    }
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_DIM {
            return Err(Error::InvalidAxis(format!(
                "grid needs between 1 and {MAX_DIM} axes, got {}",
                axes.len()
            )));
        }
        for axis in &axes {
            axis.validate()?;
        }
        let total = axes
            .iter()
            .try_fold(1u128, |acc, a| acc.checked_mul(a.count as u128))
            .unwrap_or(u128::MAX);
        // values are stored as 8-byte floats
        let addressable = (isize::MAX as u128) / 8;
        if total > addressable {
            return Err(Error::GridTooLarge(total));
        }
        let mut strides = vec![1usize; axes.len()];
        for i in (0..axes.len() - 1).rev() {
            strides[i] = strides[i + 1] * axes[i + 1].count;
        }
        Ok(GridSpec {
            len: total as usize,
            axes,
            strides,
        })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn flatten(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: index.len(),
            });
        }
        let mut flat = 0;
        for ((&i, axis), &stride) in index.iter().zip(&self.axes).zip(&self.strides) {
            if i >= axis.count {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: axis.count,
                });
            }
            flat += i * stride;
        }
        Ok(flat)
    }

    pub fn unflatten(&self, flat: usize) -> Result<NodeIndex> {
        if flat >= self.len {
            return Err(Error::IndexOutOfRange {
                index: flat,
                len: self.len,
            });
        }
        Ok(self.unflatten_unchecked(flat))
    }

    fn unflatten_unchecked(&self, mut flat: usize) -> NodeIndex {
        let mut index = NodeIndex::from_elem(0, self.dim());
        for (slot, &stride) in index.iter_mut().zip(&self.strides) {
            *slot = flat / stride;
            flat %= stride;
        }
        index
    }

    /// Coordinates of the node with the given flat index.
    pub fn node_coordinates(&self, flat: usize) -> Result<Point> {
        if flat >= self.len {
            return Err(Error::IndexOutOfRange {
                index: flat,
                len: self.len,
            });
        }
        Ok(self.node_unchecked(flat))
    }

    pub(crate) fn node_unchecked(&self, flat: usize) -> Point {
        let mut rest = flat;
        self.axes
            .iter()
            .zip(&self.strides)
            .map(|(axis, &stride)| {
                let i = rest / stride;
                rest %= stride;
                axis.node(i)
            })
            .collect()
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        if let Some(bad) = point.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "interpolation query component {bad} in {point:?}"
            )));
        }
        Ok(())
    }

    /// Multilinear interpolation of `values` at `point`. Returns the value and
    /// whether any non-periodic coordinate had to be clamped.
    pub(crate) fn interp_unchecked(&self, values: &[f64], point: &[f64]) -> (f64, bool) {
        let d = self.dim();
        let mut lower = [0usize; MAX_DIM];
        let mut upper = [0usize; MAX_DIM];
        let mut frac = [0.0f64; MAX_DIM];
        let mut clamped = false;
        for k in 0..d {
            let cell = self.axes[k].locate(point[k]);
            lower[k] = cell.lower * self.strides[k];
            upper[k] = cell.upper * self.strides[k];
            frac[k] = cell.frac;
            clamped |= cell.clamped;
        }
        // Gather the 2^d corners, then collapse one axis at a time.
        let corners = 1usize << d;
        let mut index = [0usize; 1 << MAX_DIM];
        index[0] = lower[..d].iter().sum();
        for k in 0..d {
            let half = 1usize << k;
            let step = upper[k].wrapping_sub(lower[k]);
            for j in 0..half {
                index[j + half] = index[j].wrapping_add(step);
            }
        }
        let mut buf = [0.0f64; 1 << MAX_DIM];
        for (slot, &idx) in buf[..corners].iter_mut().zip(&index[..corners]) {
            *slot = values[idx];
        }
        let mut len = corners;
        for k in 0..d {
            len >>= 1;
            let t = frac[k];
            for j in 0..len {
                let (v0, v1) = (buf[2 * j], buf[2 * j + 1]);
                buf[j] = v0 + t * (v1 - v0);
            }
        }
        let acc = buf[0];
        (acc, clamped)
    }

    /// Flat index of the node nearest to `point`.
    pub fn nearest_node(&self, point: &[f64]) -> Result<usize> {
        self.check_point(point)?;
        Ok(self
            .axes
            .iter()
            .zip(&self.strides)
            .zip(point)
            .map(|((axis, &stride), &x)| axis.nearest(x) * stride)
            .sum())
    }

    /// Iterator over all node coordinates in flat order.
    pub fn nodes(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len).map(move |i| self.node_unchecked(i))
    }

    /// Same axes with every node count multiplied by `factor` (non-periodic
    /// axes keep their endpoints: `count -> factor (count - 1) + 1`).
    pub fn refined(&self, factor: usize) -> Result<GridSpec> {
        let axes = self
            .axes
            .iter()
            .map(|a| Axis {
                count: if a.periodic {
                    a.count * factor
                } else {
                    (a.count - 1) * factor + 1
                },
                ..*a
            })
            .collect();
        GridSpec::new(axes)
    }
}

/// Value-function samples `J_k` over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    pub grid: GridSpec,
    pub stage: usize,
    pub values: Vec<f64>,
}

impl ValueTable {
    pub fn new(grid: GridSpec, stage: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(ValueTable {
            grid,
            stage,
            values,
        })
    }

    /// Samples `f` at every node.
    pub fn sample(grid: GridSpec, stage: usize, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = grid.nodes().map(|x| f(&x)).collect();
        ValueTable {
            grid,
            stage,
            values,
        }
    }

    pub fn interpolate(&self, point: &[f64]) -> Result<f64> {
        self.interpolate_tracked(point).map(|(v, _)| v)
    }

    /// Like [`interpolate`](Self::interpolate), also reporting whether the
    /// query was clamped onto the grid boundary.
    pub fn interpolate_tracked(&self, point: &[f64]) -> Result<(f64, bool)> {
        self.grid.check_point(point)?;
        Ok(self.grid.interp_unchecked(&self.values, point))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Per-node argmin input indices `μ_k` over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    pub grid: GridSpec,
    pub stage: usize,
    pub choices: Vec<u32>,
}

impl PolicyTable {
    pub fn new(grid: GridSpec, stage: usize, choices: Vec<u32>) -> Result<Self> {
        if choices.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: choices.len(),
            });
        }
        Ok(PolicyTable {
            grid,
            stage,
            choices,
        })
    }

    /// Choice stored at the node nearest to `point`.
    pub fn choice_at(&self, point: &[f64]) -> Result<usize> {
        let node = self.grid.nearest_node(point)?;
        Ok(self.choices[node] as usize)
    }

    /// Checks that every stored index addresses an input set of `inputs`
    /// elements.
    pub fn validate(&self, inputs: usize) -> Result<()> {
        match self.choices.iter().find(|&&c| c as usize >= inputs) {
            Some(&c) => Err(Error::Format(format!(
                "policy choice {c} outside an input set of {inputs}"
            ))),
            None => Ok(()),
        }
    }
}
