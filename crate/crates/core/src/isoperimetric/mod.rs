//! Cheeger constants, the ratio constants `m_Ω`/`M_Ω`, and filtration profiles.

mod cheeger;
mod filtration;

pub use cheeger::{
    cheeger, cheeger_exact, cheeger_exact_with_cap, cheeger_heuristic, cheeger_ratio,
    ratio_bounds, CheegerMode, CheegerResult, Normalization, EXACT_CAP,
};
pub use filtration::{
    build_filtration, infinity_profile, Filtration, InfinityProfile, LevelProfile,
    HEAVY_END_GROWTH,
};
