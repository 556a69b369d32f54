# Core modules for turbine-inspect
