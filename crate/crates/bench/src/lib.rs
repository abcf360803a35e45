//! Fixtures shared by the benchmarks.

use cfinsler::{MetricSpec, Point};

/// An interior point of the Hartogs triangle with a generic fiber direction.
pub fn hartogs_point() -> Point {
    Point::from_parts((0.5, 0.1), (0.1, -0.05), (1.0, 0.2), (0.4, -0.3))
}

pub fn metric(name: &str) -> MetricSpec {
    MetricSpec::builtin(name, &[]).expect("builtin metric")
}
