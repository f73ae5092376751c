# Modules package