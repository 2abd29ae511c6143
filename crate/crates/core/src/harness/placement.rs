//! Receiver placements.

use rand::Rng;

use crate::Point;

/// `K` i.i.d. points uniform in the side-`side_a` square centered on `center`.
pub fn uniform_cr_placement<R: Rng + ?Sized>(k: usize, side_a: f64, center: Point, rng: &mut R) -> Vec<Point> {
    let h = side_a / 2.0;
    (0..k)
        .map(|_| Point::new(center.x + rng.random_range(-h..=h), center.y + rng.random_range(-h..=h)))
        .collect()
}

pub const GRID_X: [f64; 5] = [-40.0, -20.0, 0.0, 20.0, 40.0];
pub const GRID_Y: [f64; 10] = [-45.0, -35.0, -25.0, -15.0, -5.0, 5.0, 15.0, 25.0, 35.0, 45.0];

/// The fixed 5×10 grid of 50 receivers around a target at the origin.
pub fn fixed_grid_placement() -> Vec<Point> {
    GRID_X.iter().flat_map(|&x| GRID_Y.iter().map(move |&y| Point::new(x, y))).collect()
}
