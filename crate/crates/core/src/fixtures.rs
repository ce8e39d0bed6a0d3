//! Automata bundled with the crate, used by tests and documentation.

use crate::dra::{parse_dra, RabinWordAutomaton};

pub const HUB_ASSUMPTIONS: &str = include_str!("../fixtures/hub_assumptions.dra");
pub const HUB_GUARANTEES: &str = include_str!("../fixtures/hub_guarantees.dra");
pub const TRIGGER_ACK_ASSUMPTIONS: &str = include_str!("../fixtures/trigger_ack_assumptions.dra");
pub const TRIGGER_ACK_GUARANTEES: &str = include_str!("../fixtures/trigger_ack_guarantees.dra");
pub const FAIR_INPUT_ASSUMPTIONS: &str = include_str!("../fixtures/fair_input_assumptions.dra");
pub const UNSATISFIABLE_GUARANTEES: &str = include_str!("../fixtures/unsatisfiable_guarantees.dra");
pub const NARROW_ASSUMPTIONS: &str = include_str!("../fixtures/narrow_assumptions.dra");
pub const NARROW_GUARANTEES: &str = include_str!("../fixtures/narrow_guarantees.dra");
pub const TRAP_ASSUMPTIONS: &str = include_str!("../fixtures/trap_assumptions.dra");
pub const TRAP_GUARANTEES: &str = include_str!("../fixtures/trap_guarantees.dra");

fn load(text: &str) -> RabinWordAutomaton {
    parse_dra(text).expect("bundled fixture parses")
}

/// 17 states over inputs x0..x2 and outputs y0..y12.
pub fn hub_assumptions() -> RabinWordAutomaton {
    load(HUB_ASSUMPTIONS)
}

pub fn hub_guarantees() -> RabinWordAutomaton {
    load(HUB_GUARANTEES)
}

/// Triggers must be acknowledged in the same step.
pub fn trigger_ack_assumptions() -> RabinWordAutomaton {
    load(TRIGGER_ACK_ASSUMPTIONS)
}

/// At least one trigger.
pub fn trigger_ack_guarantees() -> RabinWordAutomaton {
    load(TRIGGER_ACK_GUARANTEES)
}

/// Input x0 recurs; paired with [`unsatisfiable_guarantees`].
pub fn fair_input_assumptions() -> RabinWordAutomaton {
    load(FAIR_INPUT_ASSUMPTIONS)
}

pub fn unsatisfiable_guarantees() -> RabinWordAutomaton {
    load(UNSATISFIABLE_GUARANTEES)
}

/// The hub restricted to output y6.
pub fn narrow_assumptions() -> RabinWordAutomaton {
    load(NARROW_ASSUMPTIONS)
}

pub fn narrow_guarantees() -> RabinWordAutomaton {
    load(NARROW_GUARANTEES)
}

/// Universal assumption.
pub fn trap_assumptions() -> RabinWordAutomaton {
    load(TRAP_ASSUMPTIONS)
}

/// The environment can force a rejecting trap with x1.
pub fn trap_guarantees() -> RabinWordAutomaton {
    load(TRAP_GUARANTEES)
}
