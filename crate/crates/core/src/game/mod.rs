//! Force-driven game machines and their device inputs.

pub mod fork;
pub mod grasp;
pub mod progress;

pub use fork::{fork_step, ForkConfig, ForkEvent, ForkInput, ForkLevelState, ForkPhase, GameError};
pub use grasp::{grasp_step, GraspConfig, GraspEvent, GraspInput, GraspLevelState, Layer, Outcome};
pub use progress::{append_progress, ProgressRecord};

use crate::stream::wire::{DeviceId, ForceFrame};

/// Latest reading of every game device, merged into tick inputs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeviceInputs {
    pub fork: ForkInput,
    pub grasp: Option<GraspInput>,
    pub t_ms: u64,
}

impl DeviceInputs {
    pub fn apply(&mut self, frame: &ForceFrame) {
        let [a, b] = frame.values;
        self.t_ms = self.t_ms.max(frame.t_ms);
        match frame.device {
            DeviceId::Fork => {
                self.fork.grasp_n = a;
                self.fork.rotation_deg = b;
            }
            DeviceId::Knife => self.fork.knife_grasp_n = a,
            DeviceId::Pad => {
                self.fork.poke_n = a;
                self.fork.cut_n = b;
            }
            DeviceId::Grasp => self.grasp = Some(GraspInput { grasp_n: a, lift_n: b }),
        }
    }

    pub fn grasp_input(&self) -> GraspInput {
        self.grasp.unwrap_or(GraspInput { grasp_n: 0.0, lift_n: 0.0 })
    }
}
