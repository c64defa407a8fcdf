pub mod kv;
pub mod numerics;
pub mod diagnostics;
pub mod estimators;
pub mod experiments;
pub mod samplers;
pub mod targets;
