//! Phase SDE: noise, frequency profiles, Euler–Maruyama trajectories and ensembles.

pub mod ensemble;
pub mod integrator;
pub mod noise;
pub mod profile;

pub use ensemble::{ensemble, EnsembleStats, HistogramSpec};
pub use integrator::{
    default_theta_max, integrate_phase, ComplexPhase, PhaseIntegrator, Reinjection, TimeGrid, Trajectory, PHI_FLOOR,
};
pub use noise::{noise_increments, NoiseSpec, NoiseStream};
pub use profile::{FrequencyProfile, ProfileKind};
