//! State-vector oracle for the qubit cloning attack and Monte Carlo
//! simulation of complete protocol sessions.

pub mod estimate;
pub mod session;
pub mod state;

pub use estimate::{empirical_information, ContingencyTable, InfoEstimate, SideInformation};
pub use session::{
    binomial_sigma, predict, run_session, run_session_sharded, z_score, Attack, ErrorUnit,
    Prediction, SessionConfig, SessionStats,
};
pub use state::{
    classified_probabilities, clone_attack, intercept_resend_round, measure_joint, Basis,
    InterceptResend, JointState, OutcomeSampler,
};
