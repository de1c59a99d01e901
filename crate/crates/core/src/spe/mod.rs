//! Stationary threat equilibria of the firm/candidate market: feasibility of
//! payoff targets, certificates, automaton strategies and the `m × n`
//! extension.

mod automaton;
mod market;
mod multi;

pub use automaton::{
    automaton_payoffs, one_shot_deviation_scan, one_shot_deviation_scan_with, simulate_automata,
    AutomatonState, AutomatonStrategy, Deviation, MatchAutomata, NodeKind, OnPathOutcome,
};
pub use market::{
    certificate_violations, construct_certificate, construct_certificate_with,
    feasibility_violations, gap_boundary_target, lower_share, payoff_gaps, prop2_check,
    regime_bound, theorem1_feasible, upper_share, z_interval, EquilibriumCertificate, MarketParams,
    Party, PayoffTarget, ZChoice, FEASIBILITY_TOL,
};
pub use multi::{multi_discriminatory, multi_feasible, DiscriminationMode, MultiMarketParams};
