//! Shared fixtures for the benchmarks.

use paradiff::random::{random_band_limited, stream_rng};
use paradiff::symbol::random_symbol;
use paradiff::{build_partition, make_grid, GridFunction, LpPartition, Symbol};

/// A random band-limited pair `(a, u)` on the one-dimensional grid of depth `depth`.
pub struct Fixture {
    pub symbol: Symbol,
    pub input: GridFunction,
    pub partition: LpPartition,
}

pub fn fixture(depth: u32) -> Fixture {
    let grid = make_grid(1, depth).expect("valid depth");
    let n = grid.points_per_axis() as f64;
    let mut rng = stream_rng(0, depth as u64);
    Fixture {
        symbol: random_symbol(grid, n / 8.0, n / 4.0, &mut rng).expect("symbol fits"),
        input: random_band_limited(grid, n / 4.0, &mut rng),
        partition: build_partition(grid),
    }
}
