# Helpers module
