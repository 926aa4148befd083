//! Pinhole projection of annotation boxes and square crop geometry.

use nalgebra::{Matrix3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Points closer than this to the camera plane are treated as behind it.
pub const DEPTH_EPSILON: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CameraError {
    #[error("point is behind the camera (depth {depth})")]
    BehindCamera { depth: f64 },
    #[error("all box corners are behind the camera")]
    FullyBehindCamera,
    #[error("pixel box has zero width and height")]
    DegenerateBox,
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("invalid box: {0}")]
    InvalidBox(String),
}

impl CameraError {
    pub fn kind(&self) -> &'static str {
        match self {
            CameraError::BehindCamera { .. } => "BehindCamera",
            CameraError::FullyBehindCamera => "FullyBehindCamera",
            CameraError::DegenerateBox => "DegenerateBox",
            CameraError::InvalidCamera(_) => "InvalidCamera",
            CameraError::InvalidBox(_) => "InvalidBox",
        }
    }
}

/// Zero-skew pinhole camera with a rigid world-to-camera transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CameraModelRepr", into = "CameraModelRepr")]
pub struct CameraModel {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
    image_size: (u32, u32),
}

#[derive(Serialize, Deserialize)]
struct CameraModelRepr {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    /// Row-major world-to-camera rotation.
    rotation: [[f64; 3]; 3],
    translation: [f64; 3],
    image_size: (u32, u32),
}

impl TryFrom<CameraModelRepr> for CameraModel {
    type Error = CameraError;

    fn try_from(r: CameraModelRepr) -> Result<Self, Self::Error> {
        let rot = Matrix3::from_fn(|i, j| r.rotation[i][j]);
        CameraModel::new(r.fx, r.fy, r.cx, r.cy, rot, Vector3::from(r.translation), r.image_size)
    }
}

impl From<CameraModel> for CameraModelRepr {
    fn from(c: CameraModel) -> Self {
        let mut rotation = [[0.0; 3]; 3];
        for (i, row) in rotation.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = c.rotation[(i, j)];
            }
        }
        CameraModelRepr {
            fx: c.fx,
            fy: c.fy,
            cx: c.cx,
            cy: c.cy,
            rotation,
            translation: c.translation.into(),
            image_size: c.image_size,
        }
    }
}

impl CameraModel {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
        image_size: (u32, u32),
    ) -> Result<Self, CameraError> {
        if !(fx > 0.0 && fy > 0.0) {
            return Err(CameraError::InvalidCamera("focal lengths must be positive".into()));
        }
        let err = (rotation.transpose() * rotation - Matrix3::identity()).abs().max();
        if !(err <= 1e-9) || rotation.determinant() < 0.0 {
            return Err(CameraError::InvalidCamera("rotation is not a proper orthonormal matrix".into()));
        }
        Ok(Self { fx, fy, cx, cy, rotation, translation, image_size })
    }

    /// Camera at the world origin looking along +z.
    pub fn with_identity_pose(fx: f64, fy: f64, cx: f64, cy: f64, image_size: (u32, u32)) -> Self {
        Self::new(fx, fy, cx, cy, Matrix3::identity(), Vector3::zeros(), image_size)
            .expect("identity pose is valid")
    }

    pub fn image_size(&self) -> (u32, u32) {
        self.image_size
    }

    pub fn to_camera_frame(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    fn project_camera_point(&self, pc: &Vector3<f64>) -> (f64, f64) {
        (self.fx * pc.x / pc.z + self.cx, self.fy * pc.y / pc.z + self.cy)
    }

    /// Inverse pinhole map: the world point at depth `z` that projects to `(u, v)`.
    pub fn unproject(&self, u: f64, v: f64, z: f64) -> Vector3<f64> {
        let pc = Vector3::new((u - self.cx) / self.fx * z, (v - self.cy) / self.fy * z, z);
        self.rotation.transpose() * (pc - self.translation)
    }

    pub fn project_point(&self, p: &Vector3<f64>) -> Result<(f64, f64), CameraError> {
        let pc = self.to_camera_frame(p);
        if pc.z <= DEPTH_EPSILON {
            return Err(CameraError::BehindCamera { depth: pc.z });
        }
        Ok(self.project_camera_point(&pc))
    }

    /// Axis-aligned pixel bounds of the box corners in front of the camera.
    /// Not clipped to the image.
    pub fn project_box(&self, b: &Box3D) -> Result<PixelBox, CameraError> {
        let mut out: Option<PixelBox> = None;
        for corner in b.corners() {
            let pc = self.to_camera_frame(&corner);
            if pc.z <= DEPTH_EPSILON {
                continue;
            }
            let (u, v) = self.project_camera_point(&pc);
            out = Some(match out {
                None => PixelBox { u_min: u, v_min: v, u_max: u, v_max: v },
                Some(pb) => PixelBox {
                    u_min: pb.u_min.min(u),
                    v_min: pb.v_min.min(v),
                    u_max: pb.u_max.max(u),
                    v_max: pb.v_max.max(v),
                },
            });
        }
        out.ok_or(CameraError::FullyBehindCamera)
    }
}

/// Oriented 3D box; yaw is about the world vertical (third) axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3D {
    pub center: Vector3<f64>,
    /// (length, width, height)
    pub size: [f64; 3],
    pub yaw: f64,
}

impl Box3D {
    pub fn new(center: Vector3<f64>, size: [f64; 3], yaw: f64) -> Result<Self, CameraError> {
        if size.iter().any(|&d| !(d > 0.0)) {
            return Err(CameraError::InvalidBox("dimensions must be positive".into()));
        }
        Ok(Self { center, size, yaw })
    }

    pub fn corners(&self) -> [Vector3<f64>; 8] {
        let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), self.yaw);
        let half = Vector3::new(self.size[0], self.size[1], self.size[2]) * 0.5;
        let mut out = [Vector3::zeros(); 8];
        for (i, c) in out.iter_mut().enumerate() {
            let sign = |bit: usize| if i & (1 << bit) == 0 { -1.0 } else { 1.0 };
            let local = Vector3::new(sign(0) * half.x, sign(1) * half.y, sign(2) * half.z);
            *c = self.center + rot * local;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelBox {
    pub u_min: f64,
    pub v_min: f64,
    pub u_max: f64,
    pub v_max: f64,
}

impl PixelBox {
    pub fn width(&self) -> f64 {
        self.u_max - self.u_min
    }

    pub fn height(&self) -> f64 {
        self.v_max - self.v_min
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.u_min + self.u_max) * 0.5, (self.v_min + self.v_max) * 0.5)
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        (self.u_min..=self.u_max).contains(&u) && (self.v_min..=self.v_max).contains(&v)
    }
}

/// Square appearance crop in pixel coordinates. May extend past the image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareCrop {
    pub center_u: f64,
    pub center_v: f64,
    pub side: f64,
}

impl SquareCrop {
    pub fn bounds(&self) -> PixelBox {
        let h = self.side * 0.5;
        PixelBox {
            u_min: self.center_u - h,
            v_min: self.center_v - h,
            u_max: self.center_u + h,
            v_max: self.center_v + h,
        }
    }
}

pub const DEFAULT_CROP_FACTOR: f64 = 2.0;

/// Square crop of `factor` times the larger side of `pb`, same center.
pub fn expand_crop(pb: &PixelBox, factor: f64) -> Result<SquareCrop, CameraError> {
    if !(factor > 0.0) {
        return Err(CameraError::InvalidBox(format!("crop factor must be positive, got {factor}")));
    }
    if !(pb.u_min <= pb.u_max && pb.v_min <= pb.v_max) {
        return Err(CameraError::InvalidBox("pixel box bounds are inverted".into()));
    }
    let largest = pb.width().max(pb.height());
    if largest == 0.0 {
        return Err(CameraError::DegenerateBox);
    }
    let (center_u, center_v) = pb.center();
    Ok(SquareCrop { center_u, center_v, side: factor * largest })
}

/// Projects `b` and expands it into a crop.
pub fn crop_for_box(cam: &CameraModel, b: &Box3D, factor: f64) -> Result<SquareCrop, CameraError> {
    expand_crop(&cam.project_box(b)?, factor)
}
