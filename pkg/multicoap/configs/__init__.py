from pathlib import Path


config_path = Path(__file__).parent
default_configs = {
    "example1": str(config_path / "example1.yaml"),
    "example5": str(config_path / "example5.yaml"),
    "fit": str(config_path / "fit.yaml"),
}
