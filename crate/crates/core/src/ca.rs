//! Cellular-automaton substrate.
//!
//! Elementary 1D automata use Wolfram numbering: the next state of a cell
//! with neighborhood `(left, center, right)` is bit `4·left + 2·center +
//! right` of the rule number. The 2D lattice is generic over the cell type
//! and provides Moore neighborhoods of any radius.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaError {
    #[error("rule number {0} is outside 0..=255")]
    RuleOutOfRange(i64),
    #[error("row must contain at least one cell")]
    EmptyRow,
    #[error("grid dimensions must be positive, got {width}x{height}")]
    EmptyGrid { width: usize, height: usize },
    #[error("expected {expected} cells for the grid, got {actual}")]
    CellCount { expected: usize, actual: usize },
    #[error("coordinate ({x}, {y}) is outside the {width}x{height} grid")]
    OutOfBounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
    #[error("neighborhood radius must be at least 1")]
    ZeroRadius,
}

/// Eight-entry lookup for an elementary rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleTable {
    number: u8,
    outputs: [bool; 8],
}

impl RuleTable {
    pub fn new(rule_number: i64) -> Result<Self, CaError> {
        let number = u8::try_from(rule_number).map_err(|_| CaError::RuleOutOfRange(rule_number))?;
        Ok(Self::from_u8(number))
    }

    pub fn from_u8(number: u8) -> Self {
        let mut outputs = [false; 8];
        for (v, out) in outputs.iter_mut().enumerate() {
            *out = (number >> v) & 1 == 1;
        }
        Self { number, outputs }
    }

    pub fn number(&self) -> u8 {
        self.number
    }

    /// Outputs indexed by neighborhood value `4·left + 2·center + right`.
    pub fn outputs(&self) -> [bool; 8] {
        self.outputs
    }

    #[inline]
    pub fn apply(&self, left: bool, center: bool, right: bool) -> bool {
        self.outputs[(left as usize) << 2 | (center as usize) << 1 | right as usize]
    }
}

pub fn rule_table(rule_number: i64) -> Result<RuleTable, CaError> {
    RuleTable::new(rule_number)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Boundary1D {
    #[default]
    Toroidal,
    /// Cells beyond either end read as 0.
    FixedZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row1D {
    cells: Vec<bool>,
    boundary: Boundary1D,
}

impl Row1D {
    pub fn new(cells: Vec<bool>, boundary: Boundary1D) -> Result<Self, CaError> {
        if cells.is_empty() {
            return Err(CaError::EmptyRow);
        }
        Ok(Self { cells, boundary })
    }

    /// A single 1 at index `width / 2`.
    pub fn single_seed(width: usize, boundary: Boundary1D) -> Result<Self, CaError> {
        let mut cells = vec![false; width];
        if let Some(c) = cells.get_mut(width / 2) {
            *c = true;
        }
        Self::new(cells, boundary)
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn boundary(&self) -> Boundary1D {
        self.boundary
    }

    pub fn width(&self) -> usize {
        self.cells.len()
    }

    /// Rotate right by `k` cells.
    pub fn rotated(&self, k: usize) -> Self {
        let mut cells = self.cells.clone();
        let w = cells.len();
        cells.rotate_right(k % w);
        Self {
            cells,
            boundary: self.boundary,
        }
    }

    /// One synchronous update of every cell.
    pub fn step(&self, rule: &RuleTable) -> Self {
        let w = self.cells.len() as isize;
        let at = |i: isize| match self.boundary {
            Boundary1D::Toroidal => self.cells[i.rem_euclid(w) as usize],
            Boundary1D::FixedZero => (0..w).contains(&i) && self.cells[i as usize],
        };
        let cells = (0..w)
            .map(|i| rule.apply(at(i - 1), self.cells[i as usize], at(i + 1)))
            .collect();
        Self {
            cells,
            boundary: self.boundary,
        }
    }
}

pub fn step_1d(row: &Row1D, rule: &RuleTable) -> Row1D {
    row.step(rule)
}

/// `steps + 1` rows: the initial row followed by each successor.
pub fn evolve_1d(row: &Row1D, rule: &RuleTable, steps: usize) -> Vec<Row1D> {
    let mut rows = Vec::with_capacity(steps + 1);
    rows.push(row.clone());
    for _ in 0..steps {
        let next = rows.last().expect("nonempty").step(rule);
        rows.push(next);
    }
    rows
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Boundary2D {
    #[default]
    Toroidal,
    /// Neighborhoods are truncated at the edges.
    Bounded,
}

/// Occupancy of a 2D lattice cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum CellState {
    #[default]
    Empty,
    TypeA,
    TypeB,
}

impl CellState {
    pub fn is_occupied(self) -> bool {
        self != CellState::Empty
    }

    pub fn symbol(self) -> char {
        match self {
            CellState::Empty => '.',
            CellState::TypeA => 'A',
            CellState::TypeB => 'B',
        }
    }

    /// The other agent type; `Empty` maps to itself.
    pub fn opposite(self) -> Self {
        match self {
            CellState::Empty => CellState::Empty,
            CellState::TypeA => CellState::TypeB,
            CellState::TypeB => CellState::TypeA,
        }
    }
}

/// Row-major rectangular lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid2D<T> {
    width: usize,
    height: usize,
    cells: Vec<T>,
    boundary: Boundary2D,
}

impl<T: Clone> Grid2D<T> {
    pub fn filled(
        width: usize,
        height: usize,
        value: T,
        boundary: Boundary2D,
    ) -> Result<Self, CaError> {
        if width == 0 || height == 0 {
            return Err(CaError::EmptyGrid { width, height });
        }
        Ok(Self {
            width,
            height,
            cells: vec![value; width * height],
            boundary,
        })
    }
}

impl<T> Grid2D<T> {
    pub fn from_cells(
        width: usize,
        height: usize,
        cells: Vec<T>,
        boundary: Boundary2D,
    ) -> Result<Self, CaError> {
        if width == 0 || height == 0 {
            return Err(CaError::EmptyGrid { width, height });
        }
        if cells.len() != width * height {
            return Err(CaError::CellCount {
                expected: width * height,
                actual: cells.len(),
            });
        }
        Ok(Self {
            width,
            height,
            cells,
            boundary,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn boundary(&self) -> Boundary2D {
        self.boundary
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [T] {
        &mut self.cells
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.width, index / self.width)
    }

    pub fn check_bounds(&self, x: usize, y: usize) -> Result<(), CaError> {
        if x < self.width && y < self.height {
            Ok(())
        } else {
            Err(CaError::OutOfBounds {
                x,
                y,
                width: self.width,
                height: self.height,
            })
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&T> {
        (x < self.width && y < self.height).then(|| &self.cells[self.index(x, y)])
    }

    pub fn set(&mut self, x: usize, y: usize, value: T) -> Result<(), CaError> {
        self.check_bounds(x, y)?;
        let i = self.index(x, y);
        self.cells[i] = value;
        Ok(())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid2D<U> {
        Grid2D {
            width: self.width,
            height: self.height,
            cells: self.cells.iter().map(f).collect(),
            boundary: self.boundary,
        }
    }

    /// Visit the flat index of every cell within Chebyshev distance `r` of
    /// `(x, y)`, excluding the offset `(0, 0)`.
    ///
    /// On a toroidal grid each of the `(2r+1)² − 1` offsets is visited once
    /// even when the grid is narrower than the window, so a cell can be
    /// reached through several offsets. Bounded grids skip offsets that fall
    /// off the edge. Callers are expected to have bounds-checked `(x, y)`.
    #[inline]
    pub fn for_each_neighbor_index(&self, x: usize, y: usize, r: usize, mut f: impl FnMut(usize)) {
        let r = r as isize;
        let (w, h) = (self.width as isize, self.height as isize);
        for dy in -r..=r {
            let ny = y as isize + dy;
            let ny = match self.boundary {
                Boundary2D::Toroidal => ny.rem_euclid(h),
                Boundary2D::Bounded if (0..h).contains(&ny) => ny,
                Boundary2D::Bounded => continue,
            };
            for dx in -r..=r {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let nx = x as isize + dx;
                let nx = match self.boundary {
                    Boundary2D::Toroidal => nx.rem_euclid(w),
                    Boundary2D::Bounded if (0..w).contains(&nx) => nx,
                    Boundary2D::Bounded => continue,
                };
                f((ny * w + nx) as usize);
            }
        }
    }

    /// Smallest number of single-cell moves (king moves) from `a` to `b`,
    /// honoring wrap-around on toroidal grids.
    pub fn chebyshev_distance(&self, a: (usize, usize), b: (usize, usize)) -> usize {
        let axis = |p: usize, q: usize, n: usize| {
            let d = p.abs_diff(q);
            match self.boundary {
                Boundary2D::Toroidal => d.min(n - d),
                Boundary2D::Bounded => d,
            }
        };
        axis(a.0, b.0, self.width).max(axis(a.1, b.1, self.height))
    }
}

impl<T: Copy> Grid2D<T> {
    /// Cells of the radius-`r` Moore neighborhood of `(x, y)`.
    pub fn moore_neighbors(&self, x: usize, y: usize, r: usize) -> Result<Vec<T>, CaError> {
        if r == 0 {
            return Err(CaError::ZeroRadius);
        }
        self.check_bounds(x, y)?;
        let side = 2 * r + 1;
        let mut out = Vec::with_capacity(side * side - 1);
        self.for_each_neighbor_index(x, y, r, |i| out.push(self.cells[i]));
        Ok(out)
    }
}

pub fn moore_neighbors<T: Copy>(
    grid: &Grid2D<T>,
    x: usize,
    y: usize,
    r: usize,
) -> Result<Vec<T>, CaError> {
    grid.moore_neighbors(x, y, r)
}
