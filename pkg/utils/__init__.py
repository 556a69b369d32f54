# Utility modules for turbine-inspect
