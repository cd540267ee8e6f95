use crate::bell::FlipKind;
use crate::error::Result;
use crate::params::{Approach, FlipObservable, ProtocolParams};

/// Flip applied at the end of each round (index 0 is round 1).
pub fn build_schedule(params: &ProtocolParams) -> Result<Vec<FlipKind>> {
    params.validate()?;
    let schedule = (1..=params.rounds)
        .map(|round| match params.approach {
            Approach::A => match params.flip_observable {
                FlipObservable::XX => FlipKind::Phase,
                FlipObservable::ZZ => FlipKind::Polarisation,
            },
            Approach::B => FlipKind::from_flags(round % params.l_z == 0, round % params.l_x == 0),
        })
        .collect();
    Ok(schedule)
}
