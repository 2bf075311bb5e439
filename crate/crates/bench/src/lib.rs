//! Empty by design: this crate only exists to host the criterion bench
//! targets under `benches/`.
