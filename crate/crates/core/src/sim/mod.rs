//! Monte Carlo validation path: Poisson deployments, per-cell access, fading,
//! and the typical UE's SIR and rate.

mod campaign;
mod network;
mod typical;

pub use campaign::{run_campaign, sample_seed, CampaignResult, Diagnostics, SampleRecord};
pub use network::{sample_network, NetworkRealization, Point, SimWindow};
pub use typical::{
    draw_typical_link, sample_typical_rate, sample_typical_sir, typical_rate, AccessConfig, FadingDraw, TypicalLink, TypicalOutcome,
};
