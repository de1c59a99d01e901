//! Two-state automaton strategies for a single match and a one-shot
//! deviation scanner over them.
//!
//! In the base state the first proposer offers `1 − z` and its partner accepts
//! anything at least that large. Any deviation moves the match to the
//! absorbing threat state, where each proposer offers exactly what the
//! responder's outside option is worth one round later (`u/δ`). Opting out
//! ends the match and pays both agents their outside options.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spe::market::{EquilibriumCertificate, MarketParams, Party};

const CMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AutomatonState {
    Base,
    Threat,
}

/// One agent's automaton in a match.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutomatonStrategy {
    /// Whether this agent proposes in the first round.
    pub first_mover: bool,
    /// Share the first mover keeps under the base proposal.
    pub z: f64,
    pub u_self: f64,
    pub u_other: f64,
    pub discount: f64,
}

impl AutomatonStrategy {
    /// Offer made to the partner when proposing.
    pub fn offer(&self, state: AutomatonState) -> f64 {
        match state {
            AutomatonState::Base if self.first_mover => 1.0 - self.z,
            _ => self.u_other / self.discount,
        }
    }

    /// Whether an offer `y` to this agent is accepted.
    pub fn accepts(&self, state: AutomatonState, y: f64) -> bool {
        match state {
            AutomatonState::Base if !self.first_mover => y >= 1.0 - self.z - CMP_TOL,
            _ => y >= self.u_self / self.discount - CMP_TOL,
        }
    }

    /// Whether this agent opts out after offer `y` was rejected.
    pub fn opts_out(&self, state: AutomatonState, was_proposer: bool, y: f64) -> bool {
        if !was_proposer {
            return false;
        }
        match state {
            AutomatonState::Base => self.first_mover && 1.0 - y <= self.z + CMP_TOL,
            AutomatonState::Threat => y >= self.u_other / self.discount - CMP_TOL,
        }
    }
}

/// The two automata of a match, indexed 0 (first mover) and 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchAutomata {
    pub parties: [Party; 2],
    pub agents: [AutomatonStrategy; 2],
}

impl MatchAutomata {
    pub fn new(
        cert: &EquilibriumCertificate,
        mp: &MarketParams,
        first: Party,
        second: Party,
    ) -> Result<Self> {
        let z = cert.z(first, second)?;
        let (u0, u1) = (cert.u(first), cert.u(second));
        let mk = |first_mover, u_self, u_other| AutomatonStrategy {
            first_mover,
            z,
            u_self,
            u_other,
            discount: mp.discount,
        };
        Ok(MatchAutomata {
            parties: [first, second],
            agents: [mk(true, u0, u1), mk(false, u1, u0)],
        })
    }

    fn outside(&self) -> [f64; 2] {
        [self.agents[0].u_self, self.agents[1].u_self]
    }

    fn split(proposer: usize, y: f64) -> [f64; 2] {
        let mut out = [0.0; 2];
        out[proposer] = 1.0 - y;
        out[1 - proposer] = y;
        out
    }

    /// Payoffs from the start of a round played entirely by the automata.
    fn round_value(&self, state: AutomatonState, proposer: usize) -> [f64; 2] {
        self.resolve(state, proposer, Choices::default())
    }

    /// Plays one round from `state` with `proposer`, applying any forced
    /// choices, and continues by the automata afterwards.
    fn resolve(&self, state: AutomatonState, proposer: usize, forced: Choices) -> [f64; 2] {
        let responder = 1 - proposer;
        let planned = self.agents[proposer].offer(state);
        let y = forced.offer.unwrap_or(planned);
        let mut deviated = (y - planned).abs() > CMP_TOL;
        let planned_accept = self.agents[responder].accepts(state, y);
        let accept = forced.accept.unwrap_or(planned_accept);
        deviated |= accept != planned_accept;
        if accept {
            return Self::split(proposer, y);
        }
        let mut opt_out = false;
        for who in [proposer, responder] {
            let planned_out = self.agents[who].opts_out(state, who == proposer, y);
            let out = match forced.opt_out {
                Some((agent, choice)) if agent == who => choice,
                _ => planned_out,
            };
            deviated |= out != planned_out;
            opt_out |= out;
        }
        if opt_out {
            return self.outside();
        }
        let next = if deviated || state == AutomatonState::Threat {
            AutomatonState::Threat
        } else {
            state
        };
        let cont = self.round_value(next, responder);
        [
            self.agents[0].discount * cont[0],
            self.agents[0].discount * cont[1],
        ]
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Choices {
    offer: Option<f64>,
    accept: Option<bool>,
    opt_out: Option<(usize, bool)>,
}

/// The first-round result of a match played by the automata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnPathOutcome {
    pub proposer: Party,
    pub responder: Party,
    pub agreement_round: usize,
    pub proposer_share: f64,
    pub responder_share: f64,
}

/// Plays the match between `pairing = (firm, candidate)` with the given
/// first proposer.
pub fn simulate_automata(
    cert: &EquilibriumCertificate,
    mp: &MarketParams,
    pairing: (Party, Party),
    first_proposer: Party,
) -> Result<OnPathOutcome> {
    let (a, b) = pairing;
    let second = if first_proposer == a { b } else { a };
    let m = MatchAutomata::new(cert, mp, first_proposer, second)?;
    let y = m.agents[0].offer(AutomatonState::Base);
    debug_assert!(m.agents[1].accepts(AutomatonState::Base, y));
    let v = m.round_value(AutomatonState::Base, 0);
    Ok(OnPathOutcome {
        proposer: first_proposer,
        responder: second,
        agreement_round: 1,
        proposer_share: v[0],
        responder_share: v[1],
    })
}

/// Expected payoffs `(W_f, W_c1, W_c2)` of the automata, with a fair coin for
/// the first proposer and the firm meeting `c1` with probability `p`.
pub fn automaton_payoffs(
    cert: &EquilibriumCertificate,
    mp: &MarketParams,
) -> Result<(f64, f64, f64)> {
    let mut firm_share = [0.0; 2];
    for (k, c) in Party::candidates().into_iter().enumerate() {
        let f_first = simulate_automata(cert, mp, (Party::Firm, c), Party::Firm)?;
        let c_first = simulate_automata(cert, mp, (Party::Firm, c), c)?;
        firm_share[k] = 0.5 * f_first.proposer_share + 0.5 * c_first.responder_share;
    }
    let p = mp.match_prob;
    Ok((
        p * firm_share[0] + (1.0 - p) * firm_share[1],
        1.0 - firm_share[0],
        1.0 - firm_share[1],
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Propose,
    Respond,
    OptOut,
}

/// A profitable single-action deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub first_mover: Party,
    pub partner: Party,
    pub state: AutomatonState,
    pub proposer: Party,
    pub node: NodeKind,
    pub deviator: Party,
    /// Offer made at the node (the deviating offer for propose nodes).
    pub offer: f64,
    /// Chosen action: accept or opt out for the binary nodes.
    pub action: Option<bool>,
    pub gain: f64,
}

/// Scans every reachable node of every match for one-shot deviations that
/// gain more than `1e-9`.
pub fn one_shot_deviation_scan(
    cert: &EquilibriumCertificate,
    mp: &MarketParams,
    scan_grid: usize,
) -> Result<Vec<Deviation>> {
    one_shot_deviation_scan_with(cert, mp, scan_grid, 1e-9)
}

pub fn one_shot_deviation_scan_with(
    cert: &EquilibriumCertificate,
    mp: &MarketParams,
    scan_grid: usize,
    tol: f64,
) -> Result<Vec<Deviation>> {
    let mut found = Vec::new();
    for (first, second) in EquilibriumCertificate::pairings() {
        let m = MatchAutomata::new(cert, mp, first, second)?;
        let mut offers: Vec<f64> = (0..=scan_grid.max(1))
            .map(|k| k as f64 / scan_grid.max(1) as f64)
            .collect();
        let d = mp.discount;
        let z = m.agents[0].z;
        offers.extend([m.agents[0].u_self / d, m.agents[1].u_self / d, z, 1.0 - z]);
        offers.retain(|y| (0.0..=1.0).contains(y));
        offers.sort_by(f64::total_cmp);
        offers.dedup();

        let nodes = [
            (AutomatonState::Base, 0usize),
            (AutomatonState::Threat, 0),
            (AutomatonState::Threat, 1),
        ];
        for (state, proposer) in nodes {
            let responder = 1 - proposer;
            let mut record = |node, deviator: usize, y, action, dev: [f64; 2], base: [f64; 2]| {
                let gain = dev[deviator] - base[deviator];
                if gain > tol {
                    found.push(Deviation {
                        first_mover: first,
                        partner: second,
                        state,
                        proposer: m.parties[proposer],
                        node,
                        deviator: m.parties[deviator],
                        offer: y,
                        action,
                        gain,
                    });
                }
            };

            let on_path = m.round_value(state, proposer);
            for &y in &offers {
                let at_offer = Choices {
                    offer: Some(y),
                    ..Choices::default()
                };
                let reached = m.resolve(state, proposer, at_offer);
                record(NodeKind::Propose, proposer, y, None, reached, on_path);

                let planned_accept = m.agents[responder].accepts(state, y);
                let flipped = m.resolve(
                    state,
                    proposer,
                    Choices {
                        accept: Some(!planned_accept),
                        ..at_offer
                    },
                );
                record(
                    NodeKind::Respond,
                    responder,
                    y,
                    Some(!planned_accept),
                    flipped,
                    reached,
                );

                let rejected = Choices {
                    accept: Some(false),
                    ..at_offer
                };
                let after_reject = m.resolve(state, proposer, rejected);
                for who in [proposer, responder] {
                    let planned = m.agents[who].opts_out(state, who == proposer, y);
                    let dev = m.resolve(
                        state,
                        proposer,
                        Choices {
                            opt_out: Some((who, !planned)),
                            ..rejected
                        },
                    );
                    record(NodeKind::OptOut, who, y, Some(!planned), dev, after_reject);
                }
            }
        }
    }
    Ok(found)
}
