//! Command-line front door: dataset-creation pipeline (prep, extract,
//! translate, annotate, render, evaluate) and grasp-execution utilities
//! (calibrate, map, fk, ik, traj).

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
use commands::*;

#[derive(Parser)]
#[command(
    name = "graspkit",
    version,
    about = "Grasp-rectangle dataset pipeline and 7-DOF arm kinematics tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Center-crop and resize scene images for the rectangle generator
    Prep(PrepArgs),
    /// Recover rectangle pose (center, theta) from tagged images
    Extract(ExtractArgs),
    /// Extract the pose and translate it to the object centroid
    Translate(TranslateArgs),
    /// Full annotation pipeline: extract, optionally translate, refine
    Annotate(AnnotateArgs),
    /// Draw grasp rectangles onto images (paired-image creation)
    Render(RenderArgs),
    /// Score annotations against ground-truth rectangles
    Evaluate(EvaluateArgs),
    /// Fit the camera-to-robot rigid transform from correspondences
    Calibrate(CalibrateArgs),
    /// Map image-space annotations into robot-frame grasps
    Map(MapArgs),
    /// Forward kinematics of the 7-DOF arm
    Fk(FkArgs),
    /// Newton-Raphson inverse pose solution
    Ik(IkArgs),
    /// Resolved-rate trajectory generation with a CSV log and plot
    Traj(TrajArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Prep(args) => prep(args),
        Command::Extract(args) => extract(args),
        Command::Translate(args) => translate(args),
        Command::Annotate(args) => annotate(args),
        Command::Render(args) => render(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Calibrate(args) => calibrate(args),
        Command::Map(args) => map(args),
        Command::Fk(args) => fk(args),
        Command::Ik(args) => ik(args),
        Command::Traj(args) => traj(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
