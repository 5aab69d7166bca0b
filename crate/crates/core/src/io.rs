//! Plain-text field and grid files.
//!
//! Both formats start with an `nx,ny` line. A scalar field follows with
//! `ny` lines of `nx` comma-separated values; a grid follows with `nx·ny`
//! lines of `x,y`, row-major. Numbers use Rust's shortest round-trip
//! formatting, so writing and re-reading is lossless.

use std::fmt::Write as _;
use std::path::Path;

use crate::deform::Grid2D;
use crate::error::{Error, Result};
use crate::field::ScalarField2D;

pub fn field_to_csv(field: &ScalarField2D) -> String {
    let mut out = format!("{},{}\n", field.nx(), field.ny());
    for row in field.values().chunks(field.nx()) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn grid_to_csv(grid: &Grid2D) -> String {
    let mut out = format!("{},{}\n", grid.nx(), grid.ny());
    for (x, y) in grid.px().iter().zip(grid.py()) {
        writeln!(out, "{x},{y}").unwrap();
    }
    out
}

fn parse_line(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad number {t:?}")))
        })
        .collect()
}

fn parse_header(lines: &mut std::str::Lines<'_>) -> Result<(usize, usize)> {
    let head = lines
        .next()
        .ok_or_else(|| Error::Parse("missing nx,ny header".into()))?;
    let dims: Vec<usize> = head
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("bad header {head:?}")))?;
    match dims[..] {
        [nx, ny] => Ok((nx, ny)),
        _ => Err(Error::Parse(format!("bad header {head:?}"))),
    }
}

pub fn field_from_csv(text: &str) -> Result<ScalarField2D> {
    let mut lines = text.lines();
    let (nx, ny) = parse_header(&mut lines)?;
    let mut values = Vec::with_capacity(nx * ny);
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row = parse_line(line, n + 2)?;
        if row.len() != nx {
            return Err(Error::Parse(format!(
                "line {}: expected {nx} values",
                n + 2
            )));
        }
        values.extend(row);
    }
    ScalarField2D::new(nx, ny, values)
}

pub fn grid_from_csv(text: &str) -> Result<Grid2D> {
    let mut lines = text.lines();
    let (nx, ny) = parse_header(&mut lines)?;
    let (mut px, mut py) = (Vec::new(), Vec::new());
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        match parse_line(line, n + 2)?[..] {
            [x, y] => {
                px.push(x);
                py.push(y);
            }
            _ => return Err(Error::Parse(format!("line {}: expected x,y", n + 2))),
        }
    }
    Grid2D::new(nx, ny, px, py)
}

pub fn write_field(path: impl AsRef<Path>, field: &ScalarField2D) -> Result<()> {
    Ok(std::fs::write(path, field_to_csv(field))?)
}

pub fn read_field(path: impl AsRef<Path>) -> Result<ScalarField2D> {
    field_from_csv(&std::fs::read_to_string(path)?)
}

pub fn write_grid(path: impl AsRef<Path>, grid: &Grid2D) -> Result<()> {
    Ok(std::fs::write(path, grid_to_csv(grid))?)
}

pub fn read_grid(path: impl AsRef<Path>) -> Result<Grid2D> {
    grid_from_csv(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn field_layout() {
        let f = ScalarField2D::from_fn(3, 3, |x, y| x + 10.0 * y).unwrap();
        assert_eq!(field_to_csv(&f), "3,3\n0,0.5,1\n5,5.5,6\n10,10.5,11\n");
    }

    #[test]
    fn grid_layout() {
        let g = Grid2D::identity(crate::field::Lattice::new(3, 3).unwrap());
        let text = grid_to_csv(&g);
        assert!(text.starts_with("3,3\n0,0\n0.5,0\n1,0\n0,0.5\n"));
        assert_eq!(grid_from_csv(&text).unwrap().px(), g.px());
    }

    #[test]
    fn malformed_input() {
        assert!(field_from_csv("").is_err());
        assert!(field_from_csv("3\n").is_err());
        assert!(field_from_csv("3,3\n1,2\n").is_err());
        assert!(field_from_csv("3,3\n1,2,x\n1,2,3\n1,2,3\n").is_err());
        assert!(grid_from_csv("3,3\n0.1,0.2,0.3\n").is_err());
    }

    proptest! {
        #[test]
        fn field_round_trip_is_lossless(
            (nx, ny, v) in (3usize..7, 3usize..7).prop_flat_map(|(nx, ny)| {
                (Just(nx), Just(ny), prop::collection::vec(-1e6f64..1e6, nx * ny))
            })
        ) {
            let f = ScalarField2D::new(nx, ny, v).unwrap();
            prop_assert_eq!(field_from_csv(&field_to_csv(&f)).unwrap(), f);
        }
    }
}
