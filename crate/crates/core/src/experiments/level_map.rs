use std::io::Write;

use crate::field::{Dimension, Grid};
use crate::level::LevelFunction;
use crate::Result;

/// Long-format CSV of the level function: `x,level` in 1D and
/// `x1,x2,level` in 2D, nodes in grid order.
pub fn level_map_csv(grid: &Grid, levels: &LevelFunction) -> String {
    let mut out = Vec::new();
    write_level_map(&mut out, grid, levels).expect("writing to memory");
    String::from_utf8(out).expect("ascii output")
}

pub fn write_level_map<W: Write>(mut w: W, grid: &Grid, levels: &LevelFunction) -> Result<()> {
    match grid.dim() {
        Dimension::One => writeln!(w, "x,level")?,
        Dimension::Two => writeln!(w, "x1,x2,level")?,
    }
    for (k, l) in levels.nodal().iter().enumerate() {
        let p = grid.point(k);
        match grid.dim() {
            Dimension::One => writeln!(w, "{},{l:e}", p[0])?,
            Dimension::Two => writeln!(w, "{},{},{l:e}", p[0], p[1])?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let g = Grid::square(3).unwrap();
        let f = LevelFunction::constant(&g, 4.0, 2.5);
        let csv = level_map_csv(&g, &f);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[0], "x1,x2,level");
        assert_eq!(lines[1], "0,0,2.5e0");
        assert_eq!(lines[2], "0.5,0,2.5e0");
        let g1 = Grid::line(3).unwrap();
        assert!(level_map_csv(&g1, &LevelFunction::constant(&g1, 4.0, 1.0)).starts_with("x,level\n0,1e0\n"));
    }
}
