//! Plain-text, PGM and PPM encodings of automaton states.

use crate::ca::{CellState, Grid2D, Row1D};

/// One line per row, `#` for 1 and `.` for 0.
pub fn spacetime_text(rows: &[Row1D]) -> String {
    let width = rows.first().map_or(0, Row1D::width);
    let mut out = String::with_capacity(rows.len() * (width + 1));
    for row in rows {
        out.extend(row.cells().iter().map(|&c| if c { '#' } else { '.' }));
        out.push('\n');
    }
    out
}

/// Binary PGM (P5), one byte per cell: 255 for 1, 0 for 0.
pub fn spacetime_pgm(rows: &[Row1D]) -> Vec<u8> {
    let width = rows.first().map_or(0, Row1D::width);
    let mut out = format!("P5\n{} {}\n255\n", width, rows.len()).into_bytes();
    for row in rows {
        out.extend(row.cells().iter().map(|&c| if c { 255u8 } else { 0 }));
    }
    out
}

/// `.` for empty cells, `A`/`B` for agents.
pub fn grid_text(grid: &Grid2D<CellState>) -> String {
    let mut out = String::with_capacity(grid.height() * (grid.width() + 1));
    for row in grid.cells().chunks(grid.width()) {
        out.extend(row.iter().map(|c| c.symbol()));
        out.push('\n');
    }
    out
}

/// Binary PGM (P5): empty 0, type A 128, type B 255.
pub fn grid_pgm(grid: &Grid2D<CellState>) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.width(), grid.height()).into_bytes();
    out.extend(grid.cells().iter().map(|c| match c {
        CellState::Empty => 0u8,
        CellState::TypeA => 128,
        CellState::TypeB => 255,
    }));
    out
}

/// Binary PPM (P6) with a caller-chosen palette.
pub fn grid_ppm<T>(grid: &Grid2D<T>, mut color: impl FnMut(&T) -> [u8; 3]) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", grid.width(), grid.height()).into_bytes();
    for cell in grid.cells() {
        out.extend_from_slice(&color(cell));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca::{evolve_1d, rule_table, Boundary1D, Boundary2D};

    #[test]
    fn text_diagram() {
        let seed = Row1D::single_seed(5, Boundary1D::Toroidal).unwrap();
        let rows = evolve_1d(&seed, &rule_table(90).unwrap(), 1);
        assert_eq!(spacetime_text(&rows), "..#..\n.#.#.\n");
    }

    #[test]
    fn pgm_layout() {
        let seed = Row1D::single_seed(3, Boundary1D::Toroidal).unwrap();
        let rows = evolve_1d(&seed, &rule_table(0).unwrap(), 1);
        let pgm = spacetime_pgm(&rows);
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&pgm[..header.len()], header);
        assert_eq!(&pgm[header.len()..], &[0, 255, 0, 0, 0, 0]);
    }

    #[test]
    fn grid_encodings() {
        let g = Grid2D::from_cells(
            2,
            2,
            vec![
                CellState::Empty,
                CellState::TypeA,
                CellState::TypeB,
                CellState::Empty,
            ],
            Boundary2D::Toroidal,
        )
        .unwrap();
        assert_eq!(grid_text(&g), ".A\nB.\n");
        let pgm = grid_pgm(&g);
        assert_eq!(&pgm[pgm.len() - 4..], &[0, 128, 255, 0]);
        let ppm = grid_ppm(&g, |c| {
            if c.is_occupied() {
                [1, 2, 3]
            } else {
                [0, 0, 0]
            }
        });
        assert!(ppm.starts_with(b"P6\n2 2\n255\n"));
        assert_eq!(ppm.len(), 11 + 12);
    }
}
