//! Learner-versus-learner dynamics and regret measurement.

mod predict;
mod regret;
mod selfplay;

pub use predict::{
    classify_g1, classify_g1_with, theorem5_preconditions, G1Class, G1Classification,
};
pub use regret::{
    cycling_adversary, external_regret, make_adversary, play_against_adversary, AdversarySchedule,
    RegretReport,
};
pub use selfplay::{detect_convergence, self_play, Convergence, TrajectoryRecord};
