use schn_degradation::ImageBuffer;
use schn_network::convert::{images_to_tensor, tensor_to_image};
use schn_network::viz::visualize_hallucination_map;
use schn_network::{load_model, ForwardMode};

use crate::errors::CliError;
use crate::manifest::ManifestBuilder;
use crate::InferArgs;

/// Parse a mask spec into a per-module, per-branch enable mask.
///
/// Syntax: `none`, or `;`-separated entries `<module>:<maps>` where
/// `<module>` is `all` or a 1-based module index and `<maps>` is a comma
/// list of 1-based map indices. Listed outputs are zeroed.
pub fn parse_mask(
    spec: &str,
    n_modules: usize,
    n_maps: usize,
) -> Result<Vec<Vec<bool>>, CliError> {
    let mut mask = vec![vec![true; n_maps]; n_modules];
    let spec = spec.trim();
    if spec.is_empty() || spec == "none" {
        return Ok(mask);
    }
    for entry in spec.split(';') {
        let (target, maps) = entry
            .split_once(':')
            .ok_or_else(|| CliError::Config(format!("bad mask entry {entry:?}")))?;
        let module_range: Vec<usize> = if target == "all" {
            (0..n_modules).collect()
        } else {
            let idx: usize = target
                .parse()
                .map_err(|_| CliError::Config(format!("bad module index {target:?}")))?;
            if idx == 0 || idx > n_modules {
                return Err(CliError::Config(format!(
                    "module index {idx} out of range 1..={n_modules}"
                )));
            }
            vec![idx - 1]
        };
        for map in maps.split(',') {
            let idx: usize = map
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad map index {map:?}")))?;
            if idx == 0 || idx > n_maps {
                return Err(CliError::Config(format!(
                    "map index {idx} out of range 1..={n_maps}"
                )));
            }
            for &m in &module_range {
                mask[m][idx - 1] = false;
            }
        }
    }
    Ok(mask)
}

pub fn run(args: InferArgs) -> Result<(), CliError> {
    let builder = ManifestBuilder::new("infer");
    let mut model = load_model(&args.ckpt)?;
    let mask = parse_mask(&args.mask, model.config.n_modules, model.config.n_maps)?;
    model.set_ablation_mask(mask)?;

    let lr = ImageBuffer::load_png(&args.input)?;
    let input = images_to_tensor(&[&lr])?;
    let out = model.forward(&input, ForwardMode::FinalOnly)?;
    let sr = tensor_to_image(out.final_output(), 0)?;
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    sr.save_png(&args.out)?;

    let mut outputs = vec![args.out.display().to_string()];
    if let Some(dir) = &args.dump_maps {
        std::fs::create_dir_all(dir)?;
        for (m, maps) in out.maps.iter().enumerate() {
            for (b, map) in maps.iter().enumerate() {
                let img = visualize_hallucination_map(map, 0, args.gain)?;
                let path = dir.join(format!("hmap_{}_{}.png", m + 1, b + 1));
                img.save_png(&path)?;
                outputs.push(path.display().to_string());
            }
        }
    }

    let manifest_path = args.out.with_extension("manifest.json");
    builder.write(
        &manifest_path,
        serde_json::json!({
            "ckpt": args.ckpt.display().to_string(),
            "mask": args.mask,
            "gain": args.gain,
            "model": serde_json::to_value(model.config)?,
        }),
        0,
        vec![
            args.ckpt.display().to_string(),
            args.input.display().to_string(),
        ],
        outputs,
    )?;
    Ok(())
}
