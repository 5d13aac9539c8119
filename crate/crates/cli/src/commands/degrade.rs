use std::path::Path;

use schn_degradation::{
    synthesize_corpus, CorpusManifest, DegradationSpec, ImageBuffer, SynthesizedPatch,
};

use crate::errors::CliError;
use crate::manifest::ManifestBuilder;
use crate::DegradeArgs;

fn load_images(dir: &Path) -> Result<Vec<(String, ImageBuffer)>, CliError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension()
                .map(|e| e.eq_ignore_ascii_case("png"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Config(format!(
            "no PNG images under {}",
            dir.display()
        )));
    }
    let mut out = Vec::with_capacity(paths.len());
    for p in paths {
        let name = p
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        out.push((name, ImageBuffer::load_png(&p)?));
    }
    Ok(out)
}

fn write_patches(out: &Path, patches: &[SynthesizedPatch]) -> Result<(), CliError> {
    let y_dir = out.join("y");
    let x_dir = out.join("x");
    std::fs::create_dir_all(&y_dir)?;
    std::fs::create_dir_all(&x_dir)?;
    for patch in patches {
        let name = format!("patch_{:06}.png", patch.entry.index);
        patch.degraded.lr_clean.save_png(&y_dir.join(&name))?;
        patch.degraded.lr_noisy.save_png(&x_dir.join(&name))?;
    }
    Ok(())
}

pub fn run(args: DegradeArgs) -> Result<(), CliError> {
    let builder = ManifestBuilder::new("degrade");
    std::fs::create_dir_all(&args.out)?;
    let images = load_images(&args.input)?;

    let (manifest, patches) = match &args.replay {
        Some(manifest_path) => {
            // regenerate a recorded corpus bit-exactly; no random draws
            let raw = std::fs::read_to_string(manifest_path)
                .map_err(|e| CliError::Config(format!("cannot read manifest: {e}")))?;
            let manifest: CorpusManifest = serde_json::from_str(&raw)?;
            let mut patches = Vec::with_capacity(manifest.entries.len());
            for entry in &manifest.entries {
                let source = images
                    .iter()
                    .find(|(n, _)| *n == entry.source)
                    .map(|(_, img)| img)
                    .ok_or_else(|| {
                        CliError::Config(format!(
                            "manifest references missing source image {}",
                            entry.source
                        ))
                    })?;
                patches.push(manifest.replay(entry, source)?);
            }
            (manifest, patches)
        }
        None => {
            let spec_path = args.spec.as_ref().expect("clap enforces spec xor replay");
            let raw = std::fs::read_to_string(spec_path)
                .map_err(|e| CliError::Config(format!("cannot read spec: {e}")))?;
            let mut spec: DegradationSpec = serde_json::from_str(&raw)?;
            if let Some(seed) = args.seed {
                spec.seed = seed;
            }
            synthesize_corpus(&images, &spec, args.patch, args.stride)?
        }
    };

    write_patches(&args.out, &patches)?;
    let corpus_path = args.out.join("corpus.json");
    std::fs::write(&corpus_path, serde_json::to_string_pretty(&manifest)?)?;
    eprintln!(
        "wrote {} patches ({} undersized images skipped)",
        patches.len(),
        manifest.skipped_undersized
    );

    let seed = manifest.seed;
    builder.write(
        &args.out.join("manifest.json"),
        serde_json::to_value(&manifest.spec)?,
        seed,
        vec![args.input.display().to_string()],
        vec![
            args.out.join("y").display().to_string(),
            args.out.join("x").display().to_string(),
            corpus_path.display().to_string(),
        ],
    )?;
    Ok(())
}
