//! Phase portrait of spherical pure p-spin glasses: analytic landscape
//! calculators, a desk-scale Langevin simulator on planted landscapes, and the
//! batch command-line driver that ties the two together.

pub mod analytics;
pub mod cli;
pub mod numerics;
pub mod sim;
