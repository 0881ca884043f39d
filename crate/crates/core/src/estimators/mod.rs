//! Time-domain time-of-arrival pickers.

mod aic;
mod mer;
mod sla;
mod tc;
mod toa;
mod window;

pub use aic::{aic_curve, aic_pick, characteristic_function, AicParams, AicVariant};
pub use mer::{mer_pick, mer_trace};
pub use sla::{sla_pick, sla_pick_windows, sla_ratio, SlaParams};
pub use tc::{common_threshold, tc_pick};
pub use toa::{round_half_up, Method, ToaEstimate};
