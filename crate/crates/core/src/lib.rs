pub mod algebra;
pub mod asymptotics;
pub mod counting;
pub mod fixed_point;
pub mod group;
pub mod guess;
pub mod model;
pub mod pipeline;
pub mod valuation;

pub use model::{parse_corpus, parse_model, Model, ParseError, Step};

/// Model corpora shipped with the crate.
pub mod corpora {
    /// The 43 singular multisets with an infinite group.
    pub const WEIGHTED_SINGULAR: &str = include_str!("../data/weighted_singular.models");
    /// The five singular step sets.
    pub const SINGULAR5: &str = include_str!("../data/singular5.models");
    pub const FIXTURES: &str = include_str!("../data/fixtures.models");
}
