use super::{AiServiceDescriptor, LatencyClass, Task};

const PYTHON_CLIENT: &str = r#"import requests

ENDPOINT_URL = "{ENDPOINT_URL}"
UE_ID = "{UE_ID}"


def infer(frame_bytes: bytes) -> dict:
    resp = requests.post(
        ENDPOINT_URL,
        params={"ue": UE_ID},
        data=frame_bytes,
        headers={"Content-Type": "application/octet-stream"},
        timeout=2.0,
    )
    resp.raise_for_status()
    return resp.json()
"#;

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

pub fn seed_services() -> Vec<AiServiceDescriptor> {
    vec![
        AiServiceDescriptor {
            id: "resnet_cls".into(),
            name: "ResNet-50 image classification".into(),
            task: Task::Classification,
            modalities: strings(&["rgb_camera"]),
            target_classes: strings(&["bird", "cat", "dog", "horse", "sheep"]),
            latency_class: LatencyClass::NearRealtime,
            resource_units: 1,
            snippet_template: PYTHON_CLIENT.into(),
        },
        AiServiceDescriptor {
            id: "unet_seg".into(),
            name: "U-Net semantic segmentation".into(),
            task: Task::Segmentation,
            modalities: strings(&["rgb_camera", "wide_angle_camera"]),
            target_classes: strings(&["building", "road", "vegetation", "water"]),
            latency_class: LatencyClass::Batch,
            resource_units: 3,
            snippet_template: PYTHON_CLIENT.into(),
        },
        AiServiceDescriptor {
            id: "yolov8_det".into(),
            name: "YOLOv8 real-time object detection".into(),
            task: Task::ObjectDetection,
            modalities: strings(&["rgb_camera", "wide_angle_camera"]),
            target_classes: strings(&["bicycle", "car", "cat", "dog", "person"]),
            latency_class: LatencyClass::Realtime,
            resource_units: 2,
            snippet_template: PYTHON_CLIENT.into(),
        },
    ]
}
