//! Classic RLS and the multi-layered RLS stack.

mod gain;
mod mrls;
mod params;
mod rls;

pub use gain::SharedGain;
pub use mrls::{layer_select, pi_update, LayerState, MRlsEstimator};
pub use params::FilterParams;
pub use rls::RlsEstimator;
