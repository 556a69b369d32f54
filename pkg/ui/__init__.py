# UI modules for turbine-inspect
