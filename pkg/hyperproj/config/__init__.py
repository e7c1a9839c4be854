import pathlib
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

# config.toml is a local override; the committed example holds the defaults.
path = pathlib.Path(__file__).parent / "config.toml"
if not path.exists():
    path = pathlib.Path(__file__).parent / "config.example.toml"
with path.open(mode="rb") as f:
    cfg = tomllib.load(f)
