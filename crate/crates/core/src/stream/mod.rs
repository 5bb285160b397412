//! Sensor stream: wire grammar, framing, assembly, transport and the motion
//! simulator.

pub mod assemble;
pub mod framing;
pub mod queue;
pub mod sim;
pub mod source;
pub mod wire;

pub use assemble::{AssembleError, Assembler};
pub use framing::{LineFramer, MessageReader, MAX_LINE_LEN};
pub use queue::{FrameQueue, Pop};
pub use sim::{GroundTruth, MotionScript, ScriptError, ScriptSegment};
pub use source::SourceSpec;
pub use wire::{parse_line, parse_message, DeviceId, ForceFrame, WireError, WireFrame, WireMessage};
