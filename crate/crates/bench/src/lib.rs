//! Fixtures shared by the benchmarks.

use ixgroup::convolution::AlgebraElement;
use ixgroup::scalar::rational;
use ixgroup::suites::{example_dictionary, ledrappier_cocycle};
use ixgroup::{Cocycle, Dictionary, LatticeElement, Point, Scalar, Word};

pub fn scalars() -> (Scalar, Scalar) {
    let a = Scalar::sqrt(rational(6, 5)).unwrap().scale(&rational(3, 7));
    let b = Scalar::sqrt(rational(10, 3)).unwrap();
    (a.clone() + Scalar::one(), b + a)
}

pub fn dictionary() -> Dictionary {
    example_dictionary()
}

pub fn target() -> Word {
    "0110|10".parse::<Point>().unwrap().as_word().unwrap().clone()
}

pub fn ledrappier() -> Cocycle {
    ledrappier_cocycle().unwrap()
}

/// `sigma_{(1,-1)}` and a point to take its row at.
pub fn sigma_row() -> (AlgebraElement, Point) {
    let g = LatticeElement::vector(&[1, -1]);
    (AlgebraElement::sigma(&g).unwrap(), "01|1".parse().unwrap())
}
