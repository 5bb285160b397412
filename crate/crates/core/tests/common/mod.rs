//! Helpers shared by the integration and acceptance tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wise_core::game::{ForkConfig, ForkEvent, ForkInput, ForkPhase};
use wise_core::jcs::SideAngles;
use wise_core::session::{Session, SessionRow, SessionWriter};
use wise_core::stream::{Assembler, MessageReader, MotionScript, WireFrame, WireMessage};
use wise_core::{JcsConfig, JointAngles, SegmentId, UnitQuat, Vec3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the unit 3-sphere (Shoemake).
pub fn random_quat(rng: &mut impl Rng) -> UnitQuat {
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    UnitQuat::new(a * (tau * u2).sin(), a * (tau * u2).cos(), b * (tau * u3).sin(), b * (tau * u3).cos()).unwrap()
}

pub fn random_unit_vec(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if let Some(u) = v.normalized().filter(|_| v.norm() > 0.1 && v.norm() <= 1.0) {
            return u;
        }
    }
}

/// Rotation matrix from axis and angle by Rodrigues' formula.
pub fn rodrigues(axis: Vec3, angle_deg: f64) -> [[f64; 3]; 3] {
    let (s, c) = angle_deg.to_radians().sin_cos();
    let t = 1.0 - c;
    let (x, y, z) = (axis.x, axis.y, axis.z);
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

pub fn mat_vec(m: &[[f64; 3]; 3], v: Vec3) -> Vec3 {
    let a = v.to_array();
    let row = |r: &[f64; 3]| r[0] * a[0] + r[1] * a[1] + r[2] * a[2];
    Vec3::new(row(&m[0]), row(&m[1]), row(&m[2]))
}

/// Physiological, nonsingular angles for one side.
pub fn random_side(rng: &mut impl Rng) -> SideAngles {
    SideAngles {
        shoulder_plane: rng.gen_range(-40.0..120.0),
        shoulder_elevation: rng.gen_range(5.0..160.0),
        shoulder_rotation: rng.gen_range(-70.0..70.0),
        elbow_flexion: rng.gen_range(0.0..145.0),
        carrying: rng.gen_range(8.0..=20.0),
        pronation: rng.gen_range(-80.0..80.0),
        ..Default::default()
    }
}

pub fn random_angles(rng: &mut impl Rng) -> JointAngles {
    JointAngles { left: random_side(rng), right: random_side(rng) }
}

/// Renders a script as wire text, one line per module reading.
pub fn script_wire(script: &MotionScript, crc: bool) -> String {
    let mut out = String::new();
    for t in script.frame_times() {
        let (frames, _) = script.synthesize(t);
        for seg in SegmentId::ALL {
            out.push_str(&WireFrame::from_quat(seg, t, &frames.q(seg), frames.calib[seg]).with_crc(crc).render());
            out.push('\n');
        }
    }
    out
}

/// In-process equivalent of `simulate | record`: parses wire text,
/// assembles frame sets and writes a session file.
pub fn record_wire(wire: &str, cfg: &JcsConfig) -> String {
    let mut writer = SessionWriter::new(Vec::new(), &[("subject", "test")]).unwrap();
    let mut assembler = Assembler::new(100);
    for msg in MessageReader::new(wire.as_bytes()) {
        if let Ok(WireMessage::Module(f)) = msg.unwrap() {
            if let Some(Ok(set)) = assembler.offer(f) {
                writer.push(&SessionRow::from_frames(&set, cfg)).unwrap();
            }
        }
    }
    String::from_utf8(writer.finish().unwrap()).unwrap()
}

pub fn load_session(text: &str) -> Session {
    let (s, warnings) = Session::parse(text).unwrap();
    assert!(warnings.is_empty());
    s
}

/// Reference fork game written as an explicit rule table, independent of
/// the library's match.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefFork {
    pub level: u8,
    pub phase: ForkPhase,
    pub in_level: u32,
    pub total: u32,
    pub score: u32,
}

impl RefFork {
    pub fn new() -> Self {
        RefFork { level: 1, phase: ForkPhase::AwaitGrasp, in_level: 0, total: 0, score: 0 }
    }

    pub fn step(&mut self, cfg: &ForkConfig, i: &ForkInput) -> Vec<ForkEvent> {
        use ForkPhase::*;
        let f = cfg.calib_force_n;
        let grasp_need = [0.5 * f, 0.75 * f, f][usize::from(self.level) - 1];
        let rot_need = [90.0, 135.0, 135.0][usize::from(self.level) - 1];
        let held = i.grasp_n >= grasp_need;
        let poked = i.poke_n >= cfg.poke_fraction * f;
        let knife = i.knife_grasp_n >= f;
        let cut = i.cut_n >= cfg.cut_fraction * f;
        let rotated = i.rotation_deg >= rot_need && i.pointing;

        let mut ev = Vec::new();
        let finish = |s: &mut RefFork, ev: &mut Vec<ForkEvent>| {
            s.in_level += 1;
            s.total += 1;
            s.score += 100 * u32::from(s.level);
            ev.push(ForkEvent::Completion { level: s.level, count: s.in_level });
            s.phase = DoneOne;
            let needed = [3, 6, 9][usize::from(s.level) - 1];
            if s.in_level == needed {
                if s.level == 3 {
                    s.phase = Complete;
                    ev.push(ForkEvent::GameComplete);
                } else {
                    s.level += 1;
                    s.in_level = 0;
                    ev.push(ForkEvent::LevelUp { level: s.level });
                }
            }
        };
        match (self.phase, held, rotated, poked, knife, cut) {
            (Complete, ..) => {}
            (AwaitGrasp, true, ..) => {
                self.phase = AwaitLiftRotate;
                ev.push(ForkEvent::RingOpen);
            }
            (AwaitLiftRotate, false, ..) => {
                self.phase = AwaitGrasp;
                ev.push(ForkEvent::GraspLost);
            }
            (AwaitLiftRotate, true, true, ..) => {
                self.phase = AwaitPoke;
                ev.push(ForkEvent::RingRotate);
            }
            (AwaitPoke, _, _, true, ..) if self.level == 3 => {
                ev.push(ForkEvent::AppleDrop);
                self.phase = AwaitKnifeGrasp;
            }
            (AwaitPoke, _, _, true, ..) => {
                ev.push(ForkEvent::AppleDrop);
                finish(self, &mut ev);
            }
            (AwaitKnifeGrasp, _, _, _, true, _) => {
                self.phase = AwaitCut;
                ev.push(ForkEvent::KnifeGrasp);
            }
            (AwaitCut, _, _, _, _, true) => {
                ev.push(ForkEvent::AppleSlide);
                finish(self, &mut ev);
            }
            (DoneOne, false, ..) => self.phase = AwaitGrasp,
            _ => {}
        }
        ev
    }
}

/// Force values clustered on and around every threshold.
pub fn random_fork_input(rng: &mut impl Rng, f: f64) -> ForkInput {
    let force = |rng: &mut ChaCha8Rng| {
        let picks = [0.0, 0.5 * f, 0.75 * f, f, 0.5 * f - 1e-9, 0.75 * f - 1e-9, f - 1e-9];
        picks[rng.gen_range(0..picks.len())]
    };
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let rotations = [0.0, 89.999, 90.0, 134.999, 135.0, 170.0];
    ForkInput {
        grasp_n: force(&mut r),
        rotation_deg: rotations[r.gen_range(0..rotations.len())],
        poke_n: force(&mut r),
        knife_grasp_n: force(&mut r),
        cut_n: force(&mut r),
        pointing: r.gen_bool(0.9),
    }
}
